//! Pullback of invariant forms along the graph map G_f(z) = (z, df(z)).
//!
//! At a quadrature node the substitution is linear: base generators map to
//! themselves and fiber generators map to rows of the Hessian, so the pulled
//! back form lives in the small exterior algebra over the 2n base generators.
//! Forms there are stored densely, indexed by bitmask, which keeps the
//! per-node work allocation-free.

use super::MultiVector;
use nalgebra::DMatrix;

/// A constant form preprocessed for fast pullback: per monomial the base-block
/// mask, the fiber generators in ascending order, and the coefficient.
#[derive(Clone, Debug)]
pub struct PreparedForm {
    n: usize,
    monomials: Vec<(u32, Vec<u8>, f64)>,
}

impl PreparedForm {
    pub fn new(form: &MultiVector) -> Self {
        let n = form.n();
        let base_mask_all: u32 = (1u32 << (2 * n)) - 1;
        let mut monomials = Vec::new();
        for (mask, coeff) in form.terms() {
            let base = mask & base_mask_all;
            let mut fiber = Vec::new();
            let mut rest = mask & !base_mask_all;
            while rest != 0 {
                let g = rest.trailing_zeros() as u8;
                rest &= rest - 1;
                fiber.push(g);
            }
            monomials.push((base, fiber, coeff));
        }
        PreparedForm { n, monomials }
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

/// Per-node pullback state: the Hessian rows as base 1-forms plus scratch
/// buffers. Reused across nodes to avoid allocation.
pub struct PullbackContext {
    n: usize,
    d: usize,
    /// rows[j] is the image of fiber generator 2n + j (xi block then eta
    /// block), i.e. row j of the Hessian in (x-block, y-block) coordinates.
    rows: Vec<Vec<f64>>,
    scratch_a: Vec<f64>,
    scratch_b: Vec<f64>,
}

fn merge_sign_small(a: u32, b: u32) -> f64 {
    let mut inv = 0u32;
    let mut rest = b;
    while rest != 0 {
        let t = rest.trailing_zeros();
        inv += (a >> (t + 1)).count_ones();
        rest &= rest - 1;
    }
    if inv.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl PullbackContext {
    pub fn new(n: usize) -> Self {
        let d = 2 * n;
        PullbackContext {
            n,
            d,
            rows: vec![vec![0.0; d]; d],
            scratch_a: vec![0.0; 1 << d],
            scratch_b: vec![0.0; 1 << d],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Load the Hessian of f at the current node ((x-block, y-block) order).
    pub fn set_hessian(&mut self, h: &DMatrix<f64>) {
        debug_assert_eq!(h.nrows(), self.d);
        for j in 0..self.d {
            for l in 0..self.d {
                self.rows[j][l] = h[(j, l)];
            }
        }
    }

    /// Dense pullback of one monomial; the result ends up in one of the two
    /// scratch buffers, and `true` means it is `scratch_a`.
    fn monomial_dense(&mut self, base: u32, fiber: &[u8]) -> bool {
        let d = self.d;
        self.scratch_a[..1 << d].fill(0.0);
        self.scratch_a[base as usize] = 1.0;
        let mut in_a = true;
        for (step, &g) in fiber.iter().enumerate() {
            let grade = base.count_ones() as usize + step;
            // xi_j maps to Hessian row j and eta_j to row n + j; with the
            // generator layout both are row g - 2n.
            let row_idx = g as usize - 2 * self.n;
            let (src, dst, row) = if in_a {
                (&self.scratch_a, &mut self.scratch_b, &self.rows[row_idx])
            } else {
                (&self.scratch_b, &mut self.scratch_a, &self.rows[row_idx])
            };
            dst[..1 << d].fill(0.0);
            for (mask, val) in src.iter().enumerate().take(1 << d) {
                if *val == 0.0 || (mask as u32).count_ones() as usize != grade {
                    continue;
                }
                let mask = mask as u32;
                for (l, &rl) in row.iter().enumerate() {
                    if rl == 0.0 {
                        continue;
                    }
                    let bit = 1u32 << l;
                    if mask & bit != 0 {
                        continue;
                    }
                    dst[(mask | bit) as usize] += val * rl * merge_sign_small(mask, bit);
                }
            }
            in_a = !in_a;
        }
        in_a
    }

    /// Coefficient of the full base volume monomial in the pullback of `form`.
    pub fn pull_top(&mut self, form: &PreparedForm) -> f64 {
        debug_assert_eq!(form.n, self.n);
        let full = ((1u64 << self.d) - 1) as usize;
        let mut total = 0.0;
        for (base, fiber, coeff) in &form.monomials {
            if *coeff == 0.0 {
                continue;
            }
            let in_a = self.monomial_dense(*base, fiber);
            let result = if in_a { &self.scratch_a } else { &self.scratch_b };
            total += coeff * result[full];
        }
        total
    }

    /// Coefficient of the top base monomial in `one1 ^ one2 ^ pull(rest)`,
    /// where `one1`, `one2` are 1-forms on the base given by dense coefficient
    /// vectors (the beta/gamma prefixes of the Upsilon family).
    pub fn pull_top_with_prefix(&mut self, one1: &[f64], one2: &[f64], rest: &PreparedForm) -> f64 {
        let d = self.d;
        let full: u32 = (1u32 << d) - 1;
        let mut total = 0.0;
        for (base, fiber, coeff) in &rest.monomials {
            let (base, coeff) = (*base, *coeff);
            if coeff == 0.0 {
                continue;
            }
            let tail_grade = base.count_ones() as usize + fiber.len();
            if tail_grade + 2 != d {
                continue;
            }
            let in_a = self.monomial_dense(base, fiber);
            let result = if in_a { &self.scratch_a } else { &self.scratch_b };
            let mut s = 0.0;
            for a in 0..d {
                for b in (a + 1)..d {
                    let pref = one1[a] * one2[b] - one1[b] * one2[a];
                    if pref == 0.0 {
                        continue;
                    }
                    let pmask = (1u32 << a) | (1u32 << b);
                    let rest_mask = full & !pmask;
                    let c = result[rest_mask as usize];
                    if c != 0.0 {
                        s += pref * c * merge_sign_small(pmask, rest_mask);
                    }
                }
            }
            total += coeff * s;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{theta2, theta_kq};
    use nalgebra::DMatrix;

    #[test]
    fn pullback_of_theta2_is_hessian_determinant_n1() {
        // G_f^*(dxi ^ deta) = det(D^2 f) dx ^ dy for n = 1.
        let n = 1;
        let mut ctx = PullbackContext::new(n);
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 3.0]);
        ctx.set_hessian(&h);
        let prepared = PreparedForm::new(&theta2(n));
        let top = ctx.pull_top(&prepared);
        let det = 2.0 * 3.0 - 0.5 * 0.5;
        assert!((top - det).abs() < 1e-14);
    }

    /// Cross-check the dense engine against explicit sparse substitution.
    fn sparse_pull_top(n: usize, h: &DMatrix<f64>, form: &MultiVector) -> f64 {
        let sub = |g: usize| -> MultiVector {
            let mut coeffs = vec![0.0; 4 * n];
            if g < 2 * n {
                coeffs[g] = 1.0;
            } else {
                for l in 0..2 * n {
                    coeffs[l] = h[(g - 2 * n, l)];
                }
            }
            MultiVector::one_form(n, &coeffs)
        };
        let mut total = MultiVector::zero(n);
        for (mask, coeff) in form.terms() {
            let mut acc = MultiVector::scalar(n, coeff);
            let mut rest = mask;
            while rest != 0 {
                let g = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                acc = acc.wedge(&sub(g)).unwrap();
            }
            total = total.add(&acc).unwrap();
        }
        total.coefficient((1 << (2 * n)) - 1)
    }

    #[test]
    fn pullback_matches_sparse_wedge_route() {
        let n = 2;
        let mut ctx = PullbackContext::new(n);
        let h = DMatrix::from_row_slice(
            4,
            4,
            &[
                2.0, 0.3, -0.1, 0.4, 0.3, 1.5, 0.2, -0.6, -0.1, 0.2, 1.1, 0.05, 0.4, -0.6, 0.05,
                2.2,
            ],
        );
        ctx.set_hessian(&h);
        for (k, q) in [(2i64, 1i64), (2, 0), (3, 1), (4, 2)] {
            let form = theta_kq(2, k, q);
            let prepared = PreparedForm::new(&form);
            let dense = ctx.pull_top(&prepared);
            let sparse = sparse_pull_top(n, &h, &form);
            assert!(
                (dense - sparse).abs() < 1e-12,
                "k={k} q={q}: {dense} vs {sparse}"
            );
        }
    }

    #[test]
    fn prefix_route_matches_sparse_wedge() {
        let n = 2;
        let mut ctx = PullbackContext::new(n);
        let h = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.7, 0.2, -0.3, 0.1, 0.2, 2.4, 0.5, -0.2, -0.3, 0.5, 0.9, 0.0, 0.1, -0.2, 0.0, 1.3,
            ],
        );
        ctx.set_hessian(&h);
        let one1 = [0.4, -0.7, 1.1, 0.2];
        let one2 = [-0.9, 0.3, 0.0, 1.5];
        let rest = theta_kq(n, 1, 0).wedge(&crate::exterior::theta0(n)).unwrap();
        let prepared = PreparedForm::new(&rest);
        let via_prefix = ctx.pull_top_with_prefix(&one1, &one2, &prepared);

        // sparse route: wedge the base 1-forms (as multivectors) with the rest
        let f1 = MultiVector::one_form(n, &[one1.to_vec(), vec![0.0; 4]].concat());
        let f2 = MultiVector::one_form(n, &[one2.to_vec(), vec![0.0; 4]].concat());
        let total_form = f1.wedge(&f2).unwrap().wedge(&rest).unwrap();
        let sparse = sparse_pull_top(n, &h, &total_form);
        assert!((via_prefix - sparse).abs() < 1e-12);
    }
}

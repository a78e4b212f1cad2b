//! Mixed discriminants with repeated blocks and the structured matrices
//! attached to tuples of vectors in C^n.
//!
//! Vectors in C^n are stored as 2n reals in (x-block, y-block) order, matching
//! the coordinate conventions of the exterior algebra. The Hermitian product
//! is C-linear in its first slot and conjugate-linear in its second.

use crate::error::{Result, VconvError};
use nalgebra::DMatrix;
use std::collections::BTreeMap;

/// Real part of the Hermitian product of two vectors given as 2n reals.
pub fn herm_re(u: &[f64], v: &[f64]) -> f64 {
    let n = u.len() / 2;
    (0..n).map(|j| u[j] * v[j] + u[n + j] * v[n + j]).sum()
}

/// Imaginary part of the Hermitian product (C-linear first slot).
pub fn herm_im(u: &[f64], v: &[f64]) -> f64 {
    let n = u.len() / 2;
    (0..n).map(|j| u[n + j] * v[j] - u[j] * v[n + j]).sum()
}

/// Multiplication by i: (x, y) -> (-y, x).
pub fn times_i(v: &[f64]) -> Vec<f64> {
    let n = v.len() / 2;
    let mut out = vec![0.0; 2 * n];
    for j in 0..n {
        out[j] = -v[n + j];
        out[n + j] = v[j];
    }
    out
}

/// A tuple w = (w_1, ..., w_k) of vectors in C^n.
#[derive(Clone, Debug)]
pub struct VectorTuple {
    n: usize,
    vectors: Vec<Vec<f64>>,
}

impl VectorTuple {
    pub fn new(n: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let k = vectors.len();
        if k == 0 || k > 2 * n {
            return Err(VconvError::InvalidArgument(format!(
                "tuple length must satisfy 1 <= k <= 2n, got k = {k}, n = {n}"
            )));
        }
        for v in &vectors {
            if v.len() != 2 * n {
                return Err(VconvError::DimensionMismatch {
                    expected: 2 * n,
                    got: v.len(),
                });
            }
        }
        Ok(VectorTuple { n, vectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }
}

/// The four structured matrices of a tuple at a point z: the skew Gram matrix
/// I_w, the real Gram matrix R_w, and the rank-bounded Z^I_w(z), Z^R_w(z).
#[derive(Clone, Debug)]
pub struct GramPack {
    pub i_w: DMatrix<f64>,
    pub r_w: DMatrix<f64>,
    pub z_i: DMatrix<f64>,
    pub z_r: DMatrix<f64>,
}

/// Assemble the Gram pack of `w` at `z`:
/// I_w = (Im<w_j, w_l>), R_w = (Re<w_j, w_l>),
/// Z^I_w(z) = a b^T - b a^T and Z^R_w(z) = a a^T with
/// a = (Re<w_j, z>)_j, b = (Im<w_j, z>)_j.
pub fn gram_pack(w: &VectorTuple, z: &[f64]) -> GramPack {
    let k = w.k();
    let mut i_w = DMatrix::zeros(k, k);
    let mut r_w = DMatrix::zeros(k, k);
    for j in 0..k {
        for l in 0..k {
            i_w[(j, l)] = herm_im(&w.vectors[j], &w.vectors[l]);
            r_w[(j, l)] = herm_re(&w.vectors[j], &w.vectors[l]);
        }
    }
    let a: Vec<f64> = w.vectors.iter().map(|wj| herm_re(wj, z)).collect();
    let b: Vec<f64> = w.vectors.iter().map(|wj| herm_im(wj, z)).collect();
    let mut z_i = DMatrix::zeros(k, k);
    let mut z_r = DMatrix::zeros(k, k);
    for j in 0..k {
        for l in 0..k {
            z_i[(j, l)] = a[j] * b[l] - b[j] * a[l];
            z_r[(j, l)] = a[j] * a[l];
        }
    }
    GramPack { i_w, r_w, z_i, z_r }
}

/// Sparse multivariate polynomial over f64 with packed exponent keys
/// (8 bits per variable, up to 8 variables). Terms live in a sorted map so
/// accumulation order, and with it floating-point rounding, is reproducible.
#[derive(Clone, Debug, Default)]
pub struct MultiPoly {
    terms: BTreeMap<u64, f64>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = MultiPoly::zero();
        p.add_term(&[], c);
        p
    }

    fn key(exps: &[u8]) -> u64 {
        exps.iter()
            .enumerate()
            .fold(0u64, |k, (i, &e)| k | (e as u64) << (8 * i))
    }

    pub fn add_term(&mut self, exps: &[u8], c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(Self::key(exps)).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&Self::key(exps));
        }
    }

    /// The variable t_i as a polynomial.
    pub fn var(i: usize, c: f64) -> Self {
        let mut p = MultiPoly::zero();
        let mut exps = vec![0u8; i + 1];
        exps[i] = 1;
        p.add_term(&exps, c);
        p
    }

    pub fn add_assign(&mut self, other: &MultiPoly) {
        for (&k, &c) in &other.terms {
            let e = self.terms.entry(k).or_insert(0.0);
            *e += c;
            if *e == 0.0 {
                self.terms.remove(&k);
            }
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (&ka, &ca) in &self.terms {
            for (&kb, &cb) in &other.terms {
                // exponents are small (<= k <= 6), so packed addition is safe
                let k = ka + kb;
                let e = out.terms.entry(k).or_insert(0.0);
                *e += ca * cb;
                if *e == 0.0 {
                    out.terms.remove(&k);
                }
            }
        }
        out
    }

    pub fn scale(&mut self, t: f64) {
        if t == 0.0 {
            self.terms.clear();
            return;
        }
        for c in self.terms.values_mut() {
            *c *= t;
        }
    }

    pub fn coefficient(&self, exps: &[u8]) -> f64 {
        self.terms.get(&Self::key(exps)).copied().unwrap_or(0.0)
    }
}

fn validate_blocks(blocks: &[(DMatrix<f64>, usize)]) -> Result<usize> {
    let total: usize = blocks.iter().map(|(_, m)| m).sum();
    if blocks.is_empty() || total == 0 {
        return Err(VconvError::InvalidArgument(
            "det_mixed needs at least one block with positive multiplicity".into(),
        ));
    }
    let k = total;
    for (m, _) in blocks {
        if m.nrows() != k || m.ncols() != k {
            return Err(VconvError::DimensionMismatch {
                expected: k,
                got: m.nrows(),
            });
        }
    }
    Ok(k)
}

/// Symbolic determinant of the matrix with entries sum_i t_i M_i[r][c],
/// computed by subset dynamic programming over rows.
fn symbolic_det(blocks: &[(DMatrix<f64>, usize)], k: usize) -> MultiPoly {
    // entry polynomial for position (r, c)
    let entry = |r: usize, c: usize| -> MultiPoly {
        let mut p = MultiPoly::zero();
        for (i, (m, _)) in blocks.iter().enumerate() {
            let v = m[(r, c)];
            if v != 0.0 {
                p.add_assign(&MultiPoly::var(i, v));
            }
        }
        p
    };
    // dp[S] = determinant of the minor with rows S and the first |S| columns;
    // sorted maps keep the accumulation order deterministic
    let mut dp: BTreeMap<u32, MultiPoly> = BTreeMap::new();
    dp.insert(0, MultiPoly::constant(1.0));
    for size in 1..=k {
        let mut next: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (&s, minor) in &dp {
            if (s.count_ones() as usize) != size - 1 {
                continue;
            }
            for r in 0..k {
                let bit = 1u32 << r;
                if s & bit != 0 {
                    continue;
                }
                // Laplace sign for entry (pos, size-1) of the minor, where pos
                // is the row index of r within the new subset.
                let pos = (s & (bit - 1)).count_ones() as usize;
                let sign = if (pos + size - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
                let mut term = entry(r, size - 1).mul(minor);
                term.scale(sign);
                next.entry(s | bit)
                    .or_insert_with(MultiPoly::zero)
                    .add_assign(&term);
            }
        }
        dp = next;
    }
    dp.remove(&((1u32 << k) - 1)).unwrap_or_else(MultiPoly::zero)
}

/// Mixed discriminant with repeated blocks: the coefficient of the monomial
/// prod_i t_i^{m_i} in det(sum_i t_i M_i).
///
/// Exact symbolic expansion is used for k <= 5; larger k falls back to grid
/// evaluation of the determinant followed by a linear solve for the
/// coefficients of the degree-k homogeneous polynomial.
pub fn det_mixed(blocks: &[(DMatrix<f64>, usize)]) -> Result<f64> {
    let k = validate_blocks(blocks)?;
    let exps: Vec<u8> = blocks.iter().map(|(_, m)| *m as u8).collect();
    if k <= 5 {
        Ok(symbolic_det(blocks, k).coefficient(&exps))
    } else {
        Ok(det_mixed_by_interpolation(blocks, k, &exps))
    }
}

/// Enumerate exponent vectors of total degree `k` in `r` variables.
fn homogeneous_exponents(r: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current = vec![0u8; r];
    fn rec(i: usize, left: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i == current.len() - 1 {
            current[i] = left as u8;
            out.push(current.clone());
            return;
        }
        for e in 0..=left {
            current[i] = e as u8;
            rec(i + 1, left - e, current, out);
        }
    }
    if r == 0 {
        return out;
    }
    rec(0, k, &mut current, &mut out);
    out
}

fn det_mixed_by_interpolation(blocks: &[(DMatrix<f64>, usize)], k: usize, exps: &[u8]) -> f64 {
    use rand::prelude::*;
    let r = blocks.len();
    let monomials = homogeneous_exponents(r, k);
    let rows = 2 * monomials.len();
    // Fixed-seed sample points keep the fallback deterministic.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x00de_7000);
    let mut vandermonde = DMatrix::zeros(rows, monomials.len());
    let mut rhs = nalgebra::DVector::zeros(rows);
    for row in 0..rows {
        let ts: Vec<f64> = (0..r).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut m = DMatrix::zeros(k, k);
        for (i, (block, _)) in blocks.iter().enumerate() {
            m += block * ts[i];
        }
        rhs[row] = m.lu().determinant();
        for (col, alpha) in monomials.iter().enumerate() {
            vandermonde[(row, col)] = alpha
                .iter()
                .enumerate()
                .map(|(i, &e)| ts[i].powi(e as i32))
                .product();
        }
    }
    let coeffs = nalgebra::SVD::new(vandermonde, true, true)
        .solve(&rhs, 1e-13)
        .expect("interpolation solve");
    let idx = monomials
        .iter()
        .position(|alpha| alpha.as_slice() == exps)
        .expect("target monomial present");
    coeffs[idx]
}

/// Brute-force oracle: full Leibniz expansion of det(sum_i t_i M_i) with
/// symbolic polynomial arithmetic, then read off the coefficient. Exponential
/// in k; used to cross-check [`det_mixed`] in the verification suites.
pub fn det_mixed_leibniz_oracle(blocks: &[(DMatrix<f64>, usize)]) -> Result<f64> {
    let k = validate_blocks(blocks)?;
    let exps: Vec<u8> = blocks.iter().map(|(_, m)| *m as u8).collect();
    let mut total = MultiPoly::zero();
    let mut perm: Vec<usize> = (0..k).collect();
    permute(&mut perm, 0, &mut |p, sign| {
        let mut prod = MultiPoly::constant(sign);
        for (row, &col) in p.iter().enumerate() {
            let mut entry = MultiPoly::zero();
            for (i, (m, _)) in blocks.iter().enumerate() {
                let v = m[(row, col)];
                if v != 0.0 {
                    entry.add_assign(&MultiPoly::var(i, v));
                }
            }
            prod = prod.mul(&entry);
        }
        total.add_assign(&prod);
    });
    Ok(total.coefficient(&exps))
}

fn permute(perm: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize], f64)) {
    // plain recursive generation, tracking the parity of applied swaps
    fn rec(perm: &mut Vec<usize>, start: usize, sign: f64, visit: &mut impl FnMut(&[usize], f64)) {
        if start == perm.len() {
            visit(perm, sign);
            return;
        }
        for i in start..perm.len() {
            perm.swap(start, i);
            let s = if i == start { sign } else { -sign };
            rec(perm, start + 1, s, visit);
            perm.swap(start, i);
        }
    }
    rec(perm, start, 1.0, visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;

    pub(crate) fn e_j(n: usize, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; 2 * n];
        v[j] = 1.0;
        v
    }

    #[test]
    fn hermitian_product_conventions() {
        // <e_1, i e_1> = conj(i) = -i
        let n = 2;
        let e1 = e_j(n, 0);
        let ie1 = times_i(&e1);
        assert_eq!(herm_re(&e1, &ie1), 0.0);
        assert_eq!(herm_im(&e1, &ie1), -1.0);
    }

    #[test]
    fn gram_pack_e1_ie1() {
        let n = 2;
        let e1 = e_j(n, 0);
        let w = VectorTuple::new(n, vec![e1.clone(), times_i(&e1)]).unwrap();
        let gp = gram_pack(&w, &[0.2, 0.4, -0.3, 0.9]);
        assert!((gp.i_w[(0, 1)] + 1.0).abs() < 1e-15);
        assert!((gp.i_w[(1, 0)] - 1.0).abs() < 1e-15);
        assert!((gp.r_w - DMatrix::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn gram_pack_orthogonal_real_pair() {
        let n = 2;
        let w = VectorTuple::new(n, vec![e_j(n, 0), e_j(n, 1)]).unwrap();
        let gp = gram_pack(&w, &[0.0; 4]);
        assert!(gp.i_w.norm() < 1e-15);
        assert!((gp.r_w - DMatrix::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn dependent_tuple_rank_drops() {
        // w = (e_1, 2 e_1): every combination of the four matrices has rank <= 1.
        let n = 2;
        let e1 = e_j(n, 0);
        let two_e1: Vec<f64> = e1.iter().map(|v| 2.0 * v).collect();
        let w = VectorTuple::new(n, vec![e1, two_e1]).unwrap();
        let z = vec![0.7, -0.2, 0.4, 1.1];
        let gp = gram_pack(&w, &z);
        let combo = &gp.i_w + &gp.r_w + &gp.z_i + &gp.z_r;
        let rank = combo.svd(false, false).rank(1e-10);
        assert!(rank <= 1);
    }

    #[test]
    fn det_mixed_single_block_is_determinant() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0]));
        let v = det_mixed(&[(a, 2)]).unwrap();
        assert!((v - 6.0).abs() < 1e-14);
    }

    #[test]
    fn det_mixed_skew_pair() {
        // I_w = [[0,-c],[c,0]], c = 1/2: det(sI + tId) = t^2 + s^2 c^2.
        let c = 0.5;
        let i_w = DMatrix::from_row_slice(2, 2, &[0.0, -c, c, 0.0]);
        let id = DMatrix::identity(2, 2);
        let v = det_mixed(&[(i_w.clone(), 2)]).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        let v = det_mixed(&[(i_w, 1), (id, 1)]).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn det_mixed_errors() {
        let a = DMatrix::identity(2, 2);
        let b = DMatrix::identity(3, 3);
        assert!(det_mixed(&[(a.clone(), 1), (b, 1)]).is_err());
        assert!(det_mixed(&[(a, 3)]).is_err()); // multiplicities exceed size
    }

    #[test]
    fn det_mixed_dependent_tuple_blocks_vanish() {
        let n = 2;
        let e1 = e_j(n, 0);
        let dep: Vec<f64> = e1.iter().map(|v| -1.5 * v).collect();
        let w = VectorTuple::new(n, vec![e1, dep]).unwrap();
        let gp = gram_pack(&w, &[0.3, 0.1, -0.7, 0.2]);
        for blocks in [
            vec![(gp.i_w.clone(), 2)],
            vec![(gp.i_w.clone(), 1), (gp.r_w.clone(), 1)],
            vec![(gp.z_i.clone(), 1), (gp.r_w.clone(), 1)],
        ] {
            assert!(det_mixed(&blocks).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn implementation_matches_leibniz_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for k in 1..=5usize {
            for _ in 0..20 {
                let nblocks = rng.gen_range(1..=k.min(3));
                let mut ms: Vec<usize> = vec![1; nblocks];
                let mut left = k - nblocks;
                while left > 0 {
                    let i = rng.gen_range(0..nblocks);
                    ms[i] += 1;
                    left -= 1;
                }
                let blocks: Vec<(DMatrix<f64>, usize)> = ms
                    .iter()
                    .map(|&m| {
                        (
                            DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0)),
                            m,
                        )
                    })
                    .collect();
                let a = det_mixed(&blocks).unwrap();
                let b = det_mixed_leibniz_oracle(&blocks).unwrap();
                assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()), "k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn interpolation_fallback_agrees_for_k6() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let k = 6;
        let blocks: Vec<(DMatrix<f64>, usize)> = [2usize, 3, 1]
            .iter()
            .map(|&m| {
                (
                    DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0)),
                    m,
                )
            })
            .collect();
        let via_grid = det_mixed(&blocks).unwrap();
        let via_leibniz = det_mixed_leibniz_oracle(&blocks).unwrap();
        assert!((via_grid - via_leibniz).abs() < 1e-8 * (1.0 + via_leibniz.abs()));
    }

    #[test]
    fn block_permutation_symmetry() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let k = 4;
        let a = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
        let b = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
        let ab = det_mixed(&[(a.clone(), 2), (b.clone(), 2)]).unwrap();
        let ba = det_mixed(&[(b, 2), (a, 2)]).unwrap();
        assert!((ab - ba).abs() < 1e-12);
    }

    #[test]
    fn unitary_invariance_of_gram_pack() {
        // gram_pack(Uw, Uz) = gram_pack(w, z) for a unitary rotation U.
        let n = 2;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let u = crate::grassmann::random_unitary_real(n, &mut rng);
        for _ in 0..20 {
            let vs: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let z: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w = VectorTuple::new(n, vs.clone()).unwrap();
            let rot =
                VectorTuple::new(n, vs.iter().map(|v| (&u * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec()).collect())
                    .unwrap();
            let uz = (&u * nalgebra::DVector::from_column_slice(&z)).as_slice().to_vec();
            let g1 = gram_pack(&w, &z);
            let g2 = gram_pack(&rot, &uz);
            assert!((&g1.i_w - &g2.i_w).norm() < 1e-12);
            assert!((&g1.r_w - &g2.r_w).norm() < 1e-12);
            assert!((&g1.z_i - &g2.z_i).norm() < 1e-12);
            assert!((&g1.z_r - &g2.z_r).norm() < 1e-12);
        }
    }
}

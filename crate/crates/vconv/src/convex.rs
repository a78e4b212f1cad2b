//! A closed family of smooth finite-valued convex functions on R^d with exact
//! gradients and Hessians.
//!
//! Every member carries closed-form derivatives, so quadrature is the only
//! error source when these functions feed the valuation engine. The family is
//! closed under sums, nonnegative scaling, composition with linear isometries,
//! and pullback along orthogonal projections onto subspaces.

use crate::error::{Result, VconvError};
use crate::grassmann::Subspace;
use nalgebra::{DMatrix, DVector};

/// Smooth convex function on R^d (d = 2n when used on C^n).
#[derive(Clone, Debug)]
pub enum SmoothConvexFunction {
    /// (1/2) x^T A x + b^T x + c with A symmetric PSD (A stores the full Hessian).
    Quadratic {
        a: DMatrix<f64>,
        b: DVector<f64>,
        c: f64,
    },
    /// sum_i lambda_i exp(<y_i, x>) with lambda_i >= 0.
    ExpLinear { dim: usize, terms: Vec<(f64, DVector<f64>)> },
    /// alpha sqrt(1 + |x|^2).
    SmoothNorm { dim: usize, alpha: f64 },
    /// Pointwise sum.
    Sum(Vec<SmoothConvexFunction>),
    /// f(pi_E x) for f defined on the subspace E (in E-coordinates).
    PulledBack {
        inner: Box<SmoothConvexFunction>,
        /// ambient-dim x k matrix whose columns are an orthonormal basis of E
        basis: DMatrix<f64>,
    },
    /// Pointwise maximum; smooth only where one branch strictly dominates.
    /// Ties resolve to the first argument.
    Max(Box<SmoothConvexFunction>, Box<SmoothConvexFunction>),
    /// Pointwise minimum (convex only on regions where the branches do not
    /// cross; used for valuation-property checks on such pairs).
    Min(Box<SmoothConvexFunction>, Box<SmoothConvexFunction>),
}

impl SmoothConvexFunction {
    pub fn zero(dim: usize) -> Self {
        SmoothConvexFunction::ExpLinear { dim, terms: vec![] }
    }

    pub fn quadratic(a: DMatrix<f64>, b: DVector<f64>, c: f64) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() != b.len() {
            return Err(VconvError::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        Ok(SmoothConvexFunction::Quadratic { a, b, c })
    }

    /// exp(<y, .>), the building block of the Goodey-Weil real slice.
    pub fn exp_linear(y: &[f64]) -> Self {
        SmoothConvexFunction::ExpLinear {
            dim: y.len(),
            terms: vec![(1.0, DVector::from_column_slice(y))],
        }
    }

    pub fn exp_combination(dim: usize, terms: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        for (lambda, y) in &terms {
            if *lambda < 0.0 {
                return Err(VconvError::InvalidArgument(
                    "exp-linear coefficients must be nonnegative".into(),
                ));
            }
            if y.len() != dim {
                return Err(VconvError::DimensionMismatch {
                    expected: dim,
                    got: y.len(),
                });
            }
        }
        Ok(SmoothConvexFunction::ExpLinear {
            dim,
            terms: terms
                .into_iter()
                .map(|(l, y)| (l, DVector::from_vec(y)))
                .collect(),
        })
    }

    pub fn smooth_norm(dim: usize, alpha: f64) -> Result<Self> {
        if alpha <= 0.0 {
            return Err(VconvError::InvalidArgument(
                "smooth norm scale must be positive".into(),
            ));
        }
        Ok(SmoothConvexFunction::SmoothNorm { dim, alpha })
    }

    /// The composition f(pi_E x) on the ambient space, for f living on E.
    pub fn pullback(f: SmoothConvexFunction, e: &Subspace) -> Result<Self> {
        if f.dim() != e.k() {
            return Err(VconvError::DimensionMismatch {
                expected: e.k(),
                got: f.dim(),
            });
        }
        Ok(SmoothConvexFunction::PulledBack {
            inner: Box::new(f),
            basis: e.basis_matrix(),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            SmoothConvexFunction::Quadratic { a, .. } => a.nrows(),
            SmoothConvexFunction::ExpLinear { dim, .. } => *dim,
            SmoothConvexFunction::SmoothNorm { dim, .. } => *dim,
            SmoothConvexFunction::Sum(fs) => fs.first().map(|f| f.dim()).unwrap_or(0),
            SmoothConvexFunction::PulledBack { basis, .. } => basis.nrows(),
            SmoothConvexFunction::Max(f, _) | SmoothConvexFunction::Min(f, _) => f.dim(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            SmoothConvexFunction::Quadratic { a, b, c } => {
                let xv = DVector::from_column_slice(x);
                0.5 * (a * &xv).dot(&xv) + b.dot(&xv) + c
            }
            SmoothConvexFunction::ExpLinear { terms, .. } => terms
                .iter()
                .map(|(l, y)| l * y.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().exp())
                .sum(),
            SmoothConvexFunction::SmoothNorm { alpha, .. } => {
                alpha * (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt()
            }
            SmoothConvexFunction::Sum(fs) => fs.iter().map(|f| f.eval(x)).sum(),
            SmoothConvexFunction::PulledBack { inner, basis } => {
                inner.eval(project(basis, x).as_slice())
            }
            SmoothConvexFunction::Max(f, g) => {
                let (fv, gv) = (f.eval(x), g.eval(x));
                if fv >= gv {
                    fv
                } else {
                    gv
                }
            }
            SmoothConvexFunction::Min(f, g) => {
                let (fv, gv) = (f.eval(x), g.eval(x));
                if fv >= gv {
                    gv
                } else {
                    fv
                }
            }
        }
    }

    pub fn grad(&self, x: &[f64]) -> DVector<f64> {
        match self {
            SmoothConvexFunction::Quadratic { a, b, .. } => {
                a * DVector::from_column_slice(x) + b
            }
            SmoothConvexFunction::ExpLinear { dim, terms } => {
                let mut g = DVector::zeros(*dim);
                for (l, y) in terms {
                    let e = l * y.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().exp();
                    g += y * e;
                }
                g
            }
            SmoothConvexFunction::SmoothNorm { alpha, .. } => {
                let s = (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt();
                DVector::from_iterator(x.len(), x.iter().map(|v| alpha * v / s))
            }
            SmoothConvexFunction::Sum(fs) => {
                let mut g = DVector::zeros(self.dim());
                for f in fs {
                    g += f.grad(x);
                }
                g
            }
            SmoothConvexFunction::PulledBack { inner, basis } => {
                basis * inner.grad(project(basis, x).as_slice())
            }
            SmoothConvexFunction::Max(f, g) => {
                if f.eval(x) >= g.eval(x) {
                    f.grad(x)
                } else {
                    g.grad(x)
                }
            }
            SmoothConvexFunction::Min(f, g) => {
                if f.eval(x) >= g.eval(x) {
                    g.grad(x)
                } else {
                    f.grad(x)
                }
            }
        }
    }

    pub fn hess(&self, x: &[f64]) -> DMatrix<f64> {
        match self {
            SmoothConvexFunction::Quadratic { a, .. } => a.clone(),
            SmoothConvexFunction::ExpLinear { dim, terms } => {
                let mut h = DMatrix::zeros(*dim, *dim);
                for (l, y) in terms {
                    let e = l * y.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().exp();
                    h.syger(e, y, y, 1.0);
                }
                // syger fills the lower triangle; mirror it
                for r in 0..*dim {
                    for c in (r + 1)..*dim {
                        h[(r, c)] = h[(c, r)];
                    }
                }
                h
            }
            SmoothConvexFunction::SmoothNorm { dim, alpha } => {
                let s2 = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
                let s = s2.sqrt();
                let mut h = DMatrix::identity(*dim, *dim) * (alpha / s);
                for r in 0..*dim {
                    for c in 0..*dim {
                        h[(r, c)] -= alpha * x[r] * x[c] / (s2 * s);
                    }
                }
                h
            }
            SmoothConvexFunction::Sum(fs) => {
                let mut h = DMatrix::zeros(self.dim(), self.dim());
                for f in fs {
                    h += f.hess(x);
                }
                h
            }
            SmoothConvexFunction::PulledBack { inner, basis } => {
                let hi = inner.hess(project(basis, x).as_slice());
                basis * hi * basis.transpose()
            }
            SmoothConvexFunction::Max(f, g) => {
                if f.eval(x) >= g.eval(x) {
                    f.hess(x)
                } else {
                    g.hess(x)
                }
            }
            SmoothConvexFunction::Min(f, g) => {
                if f.eval(x) >= g.eval(x) {
                    g.hess(x)
                } else {
                    f.hess(x)
                }
            }
        }
    }

    /// t * f for t >= 0, staying inside the family.
    pub fn scale(&self, t: f64) -> Self {
        assert!(t >= 0.0, "scaling a convex function needs t >= 0");
        match self {
            SmoothConvexFunction::Quadratic { a, b, c } => SmoothConvexFunction::Quadratic {
                a: a * t,
                b: b * t,
                c: c * t,
            },
            SmoothConvexFunction::ExpLinear { dim, terms } => SmoothConvexFunction::ExpLinear {
                dim: *dim,
                terms: terms.iter().map(|(l, y)| (l * t, y.clone())).collect(),
            },
            SmoothConvexFunction::SmoothNorm { dim, alpha } => {
                if t == 0.0 {
                    SmoothConvexFunction::zero(*dim)
                } else {
                    SmoothConvexFunction::SmoothNorm {
                        dim: *dim,
                        alpha: alpha * t,
                    }
                }
            }
            SmoothConvexFunction::Sum(fs) => {
                SmoothConvexFunction::Sum(fs.iter().map(|f| f.scale(t)).collect())
            }
            SmoothConvexFunction::PulledBack { inner, basis } => {
                SmoothConvexFunction::PulledBack {
                    inner: Box::new(inner.scale(t)),
                    basis: basis.clone(),
                }
            }
            SmoothConvexFunction::Max(f, g) => SmoothConvexFunction::Max(
                Box::new(f.scale(t)),
                Box::new(g.scale(t)),
            ),
            SmoothConvexFunction::Min(f, g) => SmoothConvexFunction::Min(
                Box::new(f.scale(t)),
                Box::new(g.scale(t)),
            ),
        }
    }

    /// f composed with the linear isometry x -> Q x (Q orthogonal), staying in
    /// the family: used for invariance checks under the unitary action.
    pub fn compose_isometry(&self, q: &DMatrix<f64>) -> Self {
        match self {
            SmoothConvexFunction::Quadratic { a, b, c } => SmoothConvexFunction::Quadratic {
                a: q.transpose() * a * q,
                b: q.transpose() * b,
                c: *c,
            },
            SmoothConvexFunction::ExpLinear { dim, terms } => SmoothConvexFunction::ExpLinear {
                dim: *dim,
                terms: terms
                    .iter()
                    .map(|(l, y)| (*l, q.transpose() * y))
                    .collect(),
            },
            SmoothConvexFunction::SmoothNorm { .. } => self.clone(),
            SmoothConvexFunction::Sum(fs) => {
                SmoothConvexFunction::Sum(fs.iter().map(|f| f.compose_isometry(q)).collect())
            }
            SmoothConvexFunction::PulledBack { inner, basis } => {
                SmoothConvexFunction::PulledBack {
                    inner: inner.clone(),
                    basis: q.transpose() * basis,
                }
            }
            SmoothConvexFunction::Max(f, g) => SmoothConvexFunction::Max(
                Box::new(f.compose_isometry(q)),
                Box::new(g.compose_isometry(q)),
            ),
            SmoothConvexFunction::Min(f, g) => SmoothConvexFunction::Min(
                Box::new(f.compose_isometry(q)),
                Box::new(g.compose_isometry(q)),
            ),
        }
    }

    /// f + affine perturbation <l, x> + c (dually epi-translation invariance
    /// probes). The result is the Sum of self and the affine quadratic.
    pub fn plus_affine(&self, l: &[f64], c: f64) -> Self {
        let d = self.dim();
        let affine = SmoothConvexFunction::Quadratic {
            a: DMatrix::zeros(d, d),
            b: DVector::from_column_slice(l),
            c,
        };
        SmoothConvexFunction::Sum(vec![self.clone(), affine])
    }
}

fn project(basis: &DMatrix<f64>, x: &[f64]) -> DVector<f64> {
    basis.transpose() * DVector::from_column_slice(x)
}

/// Central finite-difference gradient, for consistency checks.
pub fn fd_grad(f: &SmoothConvexFunction, x: &[f64], h: f64) -> DVector<f64> {
    let d = x.len();
    let mut g = DVector::zeros(d);
    let mut xp = x.to_vec();
    for i in 0..d {
        xp[i] = x[i] + h;
        let fp = f.eval(&xp);
        xp[i] = x[i] - h;
        let fm = f.eval(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Central finite-difference Hessian (differences of the exact gradient).
pub fn fd_hess(f: &SmoothConvexFunction, x: &[f64], h: f64) -> DMatrix<f64> {
    let d = x.len();
    let mut m = DMatrix::zeros(d, d);
    let mut xp = x.to_vec();
    for i in 0..d {
        xp[i] = x[i] + h;
        let gp = f.grad(&xp);
        xp[i] = x[i] - h;
        let gm = f.grad(&xp);
        xp[i] = x[i];
        for j in 0..d {
            m[(j, i)] = (gp[j] - gm[j]) / (2.0 * h);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::random_subspace;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_member(dim: usize, rng: &mut impl Rng) -> SmoothConvexFunction {
        match rng.gen_range(0..4) {
            0 => {
                let m = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-0.7..0.7));
                let a = &m * m.transpose();
                let b = DVector::from_fn(dim, |_, _| rng.gen_range(-0.5..0.5));
                SmoothConvexFunction::quadratic(a, b, rng.gen_range(-1.0..1.0)).unwrap()
            }
            1 => {
                let terms = (0..rng.gen_range(1..3))
                    .map(|_| {
                        (
                            rng.gen_range(0.0..1.0),
                            (0..dim).map(|_| rng.gen_range(-0.8..0.8)).collect(),
                        )
                    })
                    .collect();
                SmoothConvexFunction::exp_combination(dim, terms).unwrap()
            }
            2 => SmoothConvexFunction::smooth_norm(dim, rng.gen_range(0.1..2.0)).unwrap(),
            _ => SmoothConvexFunction::Sum(vec![
                SmoothConvexFunction::smooth_norm(dim, 0.5).unwrap(),
                SmoothConvexFunction::exp_linear(
                    &(0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect::<Vec<_>>(),
                ),
            ]),
        }
    }

    #[test]
    fn quadratic_identity_hessian() {
        let d = 4;
        let f = SmoothConvexFunction::quadratic(
            DMatrix::identity(d, d),
            DVector::zeros(d),
            0.0,
        )
        .unwrap();
        let x = [0.3, -0.7, 0.2, 1.1];
        assert!((f.eval(&x) - 0.5 * x.iter().map(|v| v * v).sum::<f64>()).abs() < 1e-15);
        assert!((f.hess(&x) - DMatrix::identity(d, d)).norm() < 1e-15);
    }

    #[test]
    fn exp_linear_derivatives_at_origin() {
        let y = [0.4, -0.2, 0.9];
        let f = SmoothConvexFunction::exp_linear(&y);
        let zero = [0.0; 3];
        let g = f.grad(&zero);
        for (a, b) in g.iter().zip(&y) {
            assert!((a - b).abs() < 1e-15);
        }
        let h = f.hess(&zero);
        for r in 0..3 {
            for c in 0..3 {
                assert!((h[(r, c)] - y[r] * y[c]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sum_linearity() {
        let d = 3;
        let f = SmoothConvexFunction::smooth_norm(d, 1.0).unwrap();
        let g = SmoothConvexFunction::exp_linear(&[0.1, 0.2, -0.3]);
        let s = SmoothConvexFunction::Sum(vec![f.clone(), g.clone()]);
        let x = [0.5, -0.1, 0.8];
        assert!((s.eval(&x) - f.eval(&x) - g.eval(&x)).abs() < 1e-14);
        assert!((s.grad(&x) - f.grad(&x) - g.grad(&x)).norm() < 1e-14);
        assert!((s.hess(&x) - f.hess(&x) - g.hess(&x)).norm() < 1e-14);
    }

    #[test]
    fn finite_difference_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..100 {
            let dim = rng.gen_range(2..5);
            let f = random_member(dim, &mut rng);
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g = f.grad(&x);
            let gfd = fd_grad(&f, &x, 1e-5);
            assert!((&g - &gfd).norm() < 1e-6 * (1.0 + g.norm()));
            let h = f.hess(&x);
            let hfd = fd_hess(&f, &x, 1e-5);
            assert!((&h - &hfd).norm() < 1e-5 * (1.0 + h.norm()));
            // PSD spot check
            let eig = nalgebra::SymmetricEigen::new(h.clone());
            for ev in eig.eigenvalues.iter() {
                assert!(*ev >= -1e-10, "negative Hessian eigenvalue {ev}");
            }
        }
    }

    #[test]
    fn pullback_geometry() {
        let n = 2;
        let e = random_subspace(n, 2, 7).unwrap();
        let inner = SmoothConvexFunction::quadratic(
            DMatrix::identity(2, 2),
            DVector::zeros(2),
            0.0,
        )
        .unwrap();
        let f = SmoothConvexFunction::pullback(inner, &e).unwrap();
        // value vanishes orthogonally to E
        let mut x = vec![0.31, -0.2, 0.11, 0.74];
        let coords = e.project_coords(&x);
        let inside = e.embed(&coords);
        for (xi, v) in x.iter_mut().zip(&inside) {
            *xi -= v; // now x is orthogonal to E
        }
        assert!(f.eval(&x).abs() < 1e-12);
        // gradient lies in E
        let x2 = [0.4, 0.1, -0.3, 0.9];
        let g = f.grad(&x2);
        let g_coords = e.project_coords(g.as_slice());
        let g_proj = e.embed(&g_coords);
        for (a, b) in g.iter().zip(&g_proj) {
            assert!((a - b).abs() < 1e-12);
        }
        // Hessian rank <= k, cross-checked by finite differences
        let h = f.hess(&x2);
        assert!(h.clone().svd(false, false).rank(1e-10) <= 2);
        let hfd = fd_hess(&f, &x2, 1e-5);
        assert!((&h - &hfd).norm() < 1e-6);
    }

    #[test]
    fn scaling_and_isometry_stay_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let n = 2;
        let q = crate::grassmann::random_unitary_real(n, &mut rng);
        let f = random_member(2 * n, &mut rng);
        let x: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let qx = (&q * DVector::from_column_slice(&x)).as_slice().to_vec();
        let fq = f.compose_isometry(&q);
        assert!((fq.eval(&x) - f.eval(&qx)).abs() < 1e-12);
        let s = f.scale(2.5);
        assert!((s.eval(&x) - 2.5 * f.eval(&x)).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_errors() {
        let f = SmoothConvexFunction::quadratic(
            DMatrix::identity(3, 3),
            DVector::zeros(2),
            0.0,
        );
        assert!(f.is_err());
        let e = random_subspace(2, 2, 1).unwrap();
        let wrong = SmoothConvexFunction::smooth_norm(3, 1.0).unwrap();
        assert!(SmoothConvexFunction::pullback(wrong, &e).is_err());
    }
}

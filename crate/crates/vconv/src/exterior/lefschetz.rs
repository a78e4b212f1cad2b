//! Lefschetz operator L(tau) = omega_s ^ tau on the algebra over T*C^n,
//! primitive decomposition, and least-squares "mod omega_s" residuals.
//!
//! The symplectic vector space here is C^n x C^n of real dimension 4n, so the
//! half-dimension governing primitivity is N = 2n: a degree-k form tau is
//! primitive when L^{N-k+1} tau = 0, and L^{N-k} : Lambda^k -> Lambda^{2N-k}
//! is a bijection.

use super::{omega_s, MultiVector};
use crate::error::{Result, VconvError};
use nalgebra::{DMatrix, DVector};
use std::collections::HashMap;
use std::sync::Mutex;

/// All degree-`d` basis monomials over `4n` generators, ascending as bitmasks.
pub fn basis_masks(n: usize, d: usize) -> Vec<u32> {
    let gens = 4 * n;
    if d > gens {
        return Vec::new();
    }
    let mut out = Vec::new();
    // Gosper's hack walks fixed-popcount masks in increasing order.
    if d == 0 {
        return vec![0];
    }
    let mut mask: u32 = (1 << d) - 1;
    let limit: u32 = 1 << gens;
    while mask < limit {
        out.push(mask);
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    out
}

fn to_vector(mv: &MultiVector, masks: &[u32]) -> DVector<f64> {
    let index: HashMap<u32, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut v = DVector::zeros(masks.len());
    for (m, c) in mv.terms() {
        v[index[&m]] = c;
    }
    v
}

fn from_vector(n: usize, v: &DVector<f64>, masks: &[u32]) -> MultiVector {
    let mut mv = MultiVector::zero(n);
    for (i, &m) in masks.iter().enumerate() {
        mv.add_term(m, v[i]);
    }
    mv
}

/// Matrix of L = omega_s ^ (.) from degree `d` to degree `d + 2`.
pub fn lefschetz_matrix(n: usize, d: usize) -> DMatrix<f64> {
    let dom = basis_masks(n, d);
    let cod = basis_masks(n, d + 2);
    let index: HashMap<u32, usize> = cod.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let om = omega_s(n);
    let mut mat = DMatrix::zeros(cod.len(), dom.len());
    for (col, &m) in dom.iter().enumerate() {
        let mut e = MultiVector::zero(n);
        e.add_term(m, 1.0);
        let image = om.wedge(&e).expect("same dimension");
        for (mm, c) in image.terms() {
            mat[(index[&mm], col)] += c;
        }
    }
    mat
}

/// Apply L^p to a homogeneous form.
pub fn lefschetz_power(a: &MultiVector, p: usize) -> MultiVector {
    let om = omega_s(a.n());
    let mut out = a.clone();
    for _ in 0..p {
        out = om.wedge(&out).expect("same dimension");
    }
    out
}

type CachedSvd = std::sync::Arc<nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>>;

/// Cached least-squares factorizations of the Lefschetz matrices for one n.
///
/// mod-omega_s residuals are computed per random point in the identity suites,
/// so the SVD of the (constant) matrix is reused across calls.
pub struct LefschetzOps {
    n: usize,
    svds: Mutex<HashMap<usize, CachedSvd>>,
}

impl LefschetzOps {
    pub fn new(n: usize) -> Self {
        LefschetzOps {
            n,
            svds: Mutex::new(HashMap::new()),
        }
    }

    fn svd_for_degree(&self, d: usize) -> CachedSvd {
        let mut guard = self.svds.lock().expect("lefschetz cache poisoned");
        guard
            .entry(d)
            .or_insert_with(|| {
                std::sync::Arc::new(nalgebra::SVD::new(lefschetz_matrix(self.n, d - 2), true, true))
            })
            .clone()
    }

    /// Least-squares distance from `a` (homogeneous of degree d) to the image
    /// of L on degree d - 2; zero iff `a` is congruent to 0 mod omega_s.
    pub fn mod_omega_s_residual(&self, a: &MultiVector) -> f64 {
        if a.is_zero() {
            return 0.0;
        }
        let d = a
            .degree()
            .expect("mod_omega_s_residual expects a homogeneous form");
        if d < 2 {
            return a.norm();
        }
        let cod = basis_masks(self.n, d);
        let rhs = to_vector(a, &cod);
        let svd = self.svd_for_degree(d);
        let x = svd.solve(&rhs, 1e-12).expect("svd solve");
        let m = lefschetz_matrix(self.n, d - 2);
        (&m * &x - &rhs).norm()
    }
}

/// One-shot mod-omega_s residual (builds the factorization each call; use
/// [`LefschetzOps`] inside loops).
pub fn mod_omega_s_residual(a: &MultiVector) -> f64 {
    LefschetzOps::new(a.n()).mod_omega_s_residual(a)
}

/// Lefschetz decomposition of a homogeneous form of degree k <= 2n:
/// returns primitive components p_i (i = 0, 1, ..., floor(k/2), component i of
/// degree k - 2i) with a = sum_i L^i p_i and L^{2n-(k-2i)+1} p_i = 0.
pub fn lefschetz_decompose(a: &MultiVector) -> Result<Vec<MultiVector>> {
    let n = a.n();
    let half = 2 * n;
    let k = a.degree().ok_or_else(|| {
        VconvError::InvalidArgument("lefschetz_decompose expects a homogeneous form".into())
    })?;
    if k > half {
        return Err(VconvError::InvalidArgument(format!(
            "lefschetz_decompose expects degree <= {half}, got {k}"
        )));
    }
    let comps = k / 2 + 1;
    let dom_masks: Vec<Vec<u32>> = (0..comps).map(|i| basis_masks(n, k - 2 * i)).collect();
    let cod_masks = basis_masks(n, k);
    let widths: Vec<usize> = dom_masks.iter().map(|m| m.len()).collect();
    let total_cols: usize = widths.iter().sum();

    // Equation block: sum_i L^i p_i = a. Primitivity blocks: L^{e_i} p_i = 0
    // with e_i = half - (k - 2i) + 1 (rows drop out when the target degree
    // exceeds 4n, where L^{e_i} is identically zero).
    let mut blocks: Vec<DMatrix<f64>> = Vec::new();
    let mut rows_eq = DMatrix::zeros(cod_masks.len(), total_cols);
    {
        let mut col = 0;
        for (i, masks) in dom_masks.iter().enumerate() {
            let mut m = DMatrix::identity(masks.len(), masks.len());
            for step in 0..i {
                let deg = k - 2 * i + 2 * step;
                m = lefschetz_matrix(n, deg) * m;
            }
            rows_eq.view_mut((0, col), (cod_masks.len(), masks.len())).copy_from(&m);
            col += masks.len();
        }
    }
    blocks.push(rows_eq);
    for (i, masks) in dom_masks.iter().enumerate() {
        let deg = k - 2 * i;
        let e = half - deg + 1;
        if deg + 2 * e > 4 * n {
            continue; // L^e lands above the top degree and vanishes identically
        }
        let mut m = DMatrix::identity(masks.len(), masks.len());
        for step in 0..e {
            m = lefschetz_matrix(n, deg + 2 * step) * m;
        }
        let mut block = DMatrix::zeros(m.nrows(), total_cols);
        let col: usize = widths[..i].iter().sum();
        block.view_mut((0, col), (m.nrows(), masks.len())).copy_from(&m);
        blocks.push(block);
    }

    let total_rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut system = DMatrix::zeros(total_rows, total_cols);
    let mut rhs = DVector::zeros(total_rows);
    let mut r = 0;
    for (bi, b) in blocks.iter().enumerate() {
        system.view_mut((r, 0), (b.nrows(), total_cols)).copy_from(b);
        if bi == 0 {
            rhs.rows_mut(0, b.nrows()).copy_from(&to_vector(a, &cod_masks));
        }
        r += b.nrows();
    }

    let svd = nalgebra::SVD::new(system.clone(), true, true);
    let x = svd
        .solve(&rhs, 1e-12)
        .map_err(|_| VconvError::SingularSystem("lefschetz_decompose"))?;
    let residual = (&system * &x - &rhs).norm();
    if residual > 1e-8 * (1.0 + a.norm()) {
        return Err(VconvError::SingularSystem("lefschetz_decompose"));
    }

    let mut out = Vec::with_capacity(comps);
    let mut col = 0;
    for masks in &dom_masks {
        let slice = x.rows(col, masks.len()).into_owned();
        out.push(from_vector(n, &slice, masks));
        col += masks.len();
    }
    Ok(out)
}

/// Reassemble sum_i L^i p_i from decomposition components.
pub fn lefschetz_reassemble(parts: &[MultiVector]) -> MultiVector {
    let n = parts[0].n();
    let mut acc = MultiVector::zero(n);
    for (i, p) in parts.iter().enumerate() {
        acc = acc.add(&lefschetz_power(p, i)).expect("same dimension");
    }
    acc
}

//! Real k-dimensional subspaces of C^n: orthonormal frames, multiple Kähler
//! angles, Tasaki bases, the extremal subspaces E_{k,q} = C^q x R^{k-2q}, and
//! seeded random sampling.

use crate::error::{Result, VconvError};
use crate::mixed::{gram_pack, times_i, VectorTuple};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ORTHO_TOL: f64 = 1e-12;
/// Tolerance for pairing the singular values of the skew Gram matrix.
const PAIRING_TOL: f64 = 1e-8;

/// A real k-dimensional subspace of C^n with an orthonormal basis
/// (orthonormal with respect to Re<.,.>).
#[derive(Clone, Debug)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<f64>>,
}

impl Subspace {
    /// Wrap an orthonormal basis; rejects frames that fail orthonormality.
    pub fn new(n: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        let k = basis.len();
        if k == 0 || k > 2 * n {
            return Err(VconvError::InvalidArgument(format!(
                "subspace dimension must satisfy 1 <= k <= 2n, got {k}"
            )));
        }
        for b in &basis {
            if b.len() != 2 * n {
                return Err(VconvError::DimensionMismatch {
                    expected: 2 * n,
                    got: b.len(),
                });
            }
        }
        let mut residual = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                let dot: f64 = basis[i].iter().zip(&basis[j]).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                residual = residual.max((dot - target).abs());
            }
        }
        if residual > ORTHO_TOL {
            return Err(VconvError::NotOrthonormal(residual));
        }
        Ok(Subspace { n, basis })
    }

    /// Orthonormalize a spanning set (QR) and wrap the result.
    pub fn from_span(n: usize, span: &[Vec<f64>]) -> Result<Self> {
        let k = span.len();
        let m = DMatrix::from_fn(2 * n, k, |r, c| span[c][r]);
        let qr = m.qr();
        let q = qr.q();
        let basis = (0..k).map(|c| q.column(c).as_slice().to_vec()).collect();
        Subspace::new(n, basis)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// 2n x k matrix whose columns are the basis vectors.
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(2 * self.n, self.k(), |r, c| self.basis[c][r])
    }

    pub fn as_tuple(&self) -> VectorTuple {
        VectorTuple::new(self.n, self.basis.clone()).expect("valid basis")
    }

    /// Coordinates of the orthogonal projection of `x` onto the subspace.
    pub fn project_coords(&self, x: &[f64]) -> Vec<f64> {
        self.basis
            .iter()
            .map(|b| b.iter().zip(x).map(|(a, v)| a * v).sum())
            .collect()
    }

    /// The ambient point with the given subspace coordinates.
    pub fn embed(&self, coords: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.n];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (o, v) in out.iter_mut().zip(b) {
                *o += c * v;
            }
        }
        out
    }
}

/// The multiple Kähler angle vector of a subspace: floor(k/2) values in
/// [0, pi/2], sorted ascending; for k > n the leading k - n entries vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct KahlerAngles {
    angles: Vec<f64>,
}

impl KahlerAngles {
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Kähler angles from the paired singular values of the skew Gram matrix of
/// any orthonormal basis. Independent of the basis choice.
pub fn kahler_angles(e: &Subspace) -> Result<KahlerAngles> {
    let k = e.k();
    let gp = gram_pack(&e.as_tuple(), &vec![0.0; 2 * e.n()]);
    let svd = gp.i_w.svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if k % 2 == 1 {
        let last = sv.pop().unwrap();
        if last > PAIRING_TOL {
            return Err(VconvError::InvalidArgument(format!(
                "odd-dimensional subspace with nonzero trailing singular value {last:.3e}"
            )));
        }
    }
    let mut angles = Vec::with_capacity(k / 2);
    for pair in sv.chunks(2) {
        if (pair[0] - pair[1]).abs() > PAIRING_TOL {
            return Err(VconvError::InvalidArgument(format!(
                "singular values of the skew Gram matrix failed to pair: {:?}",
                pair
            )));
        }
        let c = 0.5 * (pair[0] + pair[1]);
        // acos is ill-conditioned at c = 1 (theta ~ sqrt(2 eps) wobble), so
        // cosines within 1e-14 of 1 collapse to an exact zero angle.
        let angle = if c >= 1.0 - 1e-14 {
            0.0
        } else {
            c.clamp(0.0, 1.0).acos()
        };
        angles.push(angle);
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // k > n forces k - n complex directions, i.e. leading zero angles.
    if k > e.n() {
        for (j, &a) in angles.iter().take(k - e.n()).enumerate() {
            if a > 1e-6 {
                return Err(VconvError::InvalidArgument(format!(
                    "expected forced zero angle at position {j} for k > n, got {a:.3e}"
                )));
            }
        }
    }
    Ok(KahlerAngles { angles })
}

/// An orthonormal basis of `e` whose skew Gram matrix is in the 2x2
/// block-diagonal normal form: blocks [[0, -cos t_j], [cos t_j, 0]] for the
/// angles t_j ascending, then zero blocks, with a trailing zero row/column for
/// odd k. When two angles coincide any valid block rotation is accepted.
pub fn tasaki_basis(e: &Subspace) -> Result<VectorTuple> {
    let k = e.k();
    let tuple = e.as_tuple();
    let gp = gram_pack(&tuple, &vec![0.0; 2 * e.n()]);
    let i_w = gp.i_w.clone();
    let b = -&i_w * &i_w; // symmetric PSD; eigenvalues are cos^2 of the angles

    // Working orthonormal basis of the not-yet-paired subspace of R^k.
    let mut remaining = DMatrix::<f64>::identity(k, k);
    let mut pairs: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::new();
    loop {
        let dim = remaining.ncols();
        if dim == 0 {
            break;
        }
        let br = remaining.transpose() * &b * &remaining;
        let eig = nalgebra::SymmetricEigen::new(br);
        // take the largest remaining eigenvalue
        let (idx, &lambda) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        // Numerical noise on -I_w^2 sits near 1e-15, so eigenvalues below this
        // cutoff belong to the kernel (cos = 0 blocks).
        if lambda < 1e-13 {
            break;
        }
        if dim < 2 {
            return Err(VconvError::SingularSystem("tasaki_basis pairing parity"));
        }
        let c = lambda.sqrt();
        let u = &remaining * eig.eigenvectors.column(idx);
        let v = (&i_w * &u) / c;
        // shrink `remaining` to the orthogonal complement of span(u, v)
        let mut cols: Vec<DVector<f64>> = Vec::new();
        for ci in 0..dim {
            let mut w = remaining.column(ci).into_owned();
            w -= &u * (u.dot(&w));
            w -= &v * (v.dot(&w));
            for prev in &cols {
                let d = prev.dot(&w);
                w -= prev * d;
            }
            let norm = w.norm();
            if norm > 1e-8 {
                cols.push(w / norm);
            }
        }
        if cols.len() != dim - 2 {
            return Err(VconvError::SingularSystem("tasaki_basis deflation"));
        }
        remaining = if cols.is_empty() {
            DMatrix::zeros(k, 0)
        } else {
            DMatrix::from_columns(&cols)
        };
        pairs.push((c, u, v));
    }
    // kernel vectors fill the zero blocks (and the odd trailing direction)
    let kernel: Vec<DVector<f64>> = (0..remaining.ncols())
        .map(|c| remaining.column(c).into_owned())
        .collect();
    if 2 * pairs.len() + kernel.len() != k {
        return Err(VconvError::SingularSystem("tasaki_basis pairing"));
    }
    // angles ascending = cosines descending
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let mut coeffs: Vec<DVector<f64>> = Vec::with_capacity(k);
    for (_, u, v) in &pairs {
        coeffs.push(u.clone());
        coeffs.push(v.clone());
    }
    coeffs.extend(kernel);

    let vectors: Vec<Vec<f64>> = coeffs
        .iter()
        .map(|q| {
            let mut out = vec![0.0; 2 * e.n()];
            for (j, basis_vec) in e.basis().iter().enumerate() {
                for (o, bv) in out.iter_mut().zip(basis_vec) {
                    *o += q[j] * bv;
                }
            }
            out
        })
        .collect();
    let result = VectorTuple::new(e.n(), vectors)?;

    // post-condition: the skew Gram matrix matches the normal form
    let residual = tasaki_normal_form_residual(&result)?;
    if residual > 1e-10 {
        return Err(VconvError::NotTasaki(residual));
    }
    Ok(result)
}

/// Residual of a tuple against the block-diagonal Tasaki normal form of its
/// own skew Gram matrix (zero for a genuine Tasaki basis): off-block entries
/// vanish, each 2x2 block is [[0, -c], [c, 0]] with c >= 0, the cosines
/// descend, and the tuple is orthonormal.
pub fn tasaki_normal_form_residual(w: &VectorTuple) -> Result<f64> {
    let k = w.k();
    let n = w.n();
    let gp = gram_pack(w, &vec![0.0; 2 * n]);
    let mut residual = 0.0f64;
    for j in 0..k {
        for l in 0..k {
            let same_block = j != l && j / 2 == l / 2 && l < 2 * (k / 2) && j < 2 * (k / 2);
            if !same_block {
                residual = residual.max(gp.i_w[(j, l)].abs());
            }
            let target = if j == l { 1.0 } else { 0.0 };
            residual = residual.max((gp.r_w[(j, l)] - target).abs());
        }
    }
    let mut last = f64::INFINITY;
    for b in 0..k / 2 {
        let c = gp.i_w[(2 * b + 1, 2 * b)];
        residual = residual.max((-c).max(0.0)); // entry below the diagonal is +cos
        if c > last {
            residual = residual.max(c - last);
        }
        last = c;
    }
    Ok(residual)
}

/// The extremal subspace E_{k,q} = C^q x R^{k-2q} with its canonical basis
/// e_1, i e_1, ..., e_q, i e_q, e_{q+1}, ..., e_{k-q}.
pub fn extremal_subspace(n: usize, k: usize, q: usize) -> Result<Subspace> {
    if k == 0 || k > 2 * n || q > k / 2 || q + n < k || k - q > n {
        return Err(VconvError::IndexOutOfRange(format!(
            "E_{{k,q}} requires 1 <= k <= 2n, max(0, k-n) <= q <= floor(k/2), k-2q <= n-q; got n={n}, k={k}, q={q}"
        )));
    }
    let mut basis = Vec::with_capacity(k);
    let e = |j: usize| {
        let mut v = vec![0.0; 2 * n];
        v[j] = 1.0;
        v
    };
    for j in 0..q {
        basis.push(e(j));
        basis.push(times_i(&e(j)));
    }
    for j in q..(k - q) {
        basis.push(e(j));
    }
    Subspace::new(n, basis)
}

/// Haar-style random subspace: orthonormalized Gaussian frame, deterministic
/// per seed.
pub fn random_subspace(n: usize, k: usize, seed: u64) -> Result<Subspace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_subspace_with(n, k, &mut rng)
}

/// Random subspace drawn from a caller-provided generator.
pub fn random_subspace_with(n: usize, k: usize, rng: &mut impl Rng) -> Result<Subspace> {
    if k == 0 || k > 2 * n {
        return Err(VconvError::InvalidArgument(format!(
            "subspace dimension must satisfy 1 <= k <= 2n, got {k}"
        )));
    }
    let span: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..2 * n).map(|_| gaussian(rng)).collect())
        .collect();
    Subspace::from_span(n, &span)
}

/// Standard normal sample by Box-Muller.
pub fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// A random unitary matrix acting on C^n, returned as the corresponding real
/// 2n x 2n orthogonal matrix in (x-block, y-block) coordinates.
pub fn random_unitary_real(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    let q = g.qr().q();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let v = q[(r, c)];
            out[(r, c)] = v.re;
            out[(r, n + c)] = -v.im;
            out[(n + r, c)] = v.im;
            out[(n + r, n + c)] = v.re;
        }
    }
    out
}

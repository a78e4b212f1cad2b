//! Exterior algebra over the 4n real cotangent generators of T*C^n.
//!
//! Generators are ordered x_1..x_n, y_1..y_n, xi_1..xi_n, eta_1..eta_n and a
//! basis monomial is a strictly sorted subset of generators, stored as a
//! bitmask. All signs flow from this canonical order.

mod lefschetz;
mod pullback;

pub use lefschetz::{
    basis_masks, lefschetz_decompose, lefschetz_matrix, lefschetz_power, lefschetz_reassemble,
    mod_omega_s_residual, LefschetzOps,
};
pub use pullback::{PreparedForm, PullbackContext};

use crate::error::{Result, VconvError};
use std::collections::BTreeMap;
use std::fmt;

/// Maximum supported complex dimension (4n generators must fit in a u32 mask).
pub const MAX_N: usize = 6;

/// Index of the generator `dx_j` (0-based `j`).
pub fn gen_x(n: usize, j: usize) -> usize {
    debug_assert!(j < n);
    j
}
/// Index of the generator `dy_j`.
pub fn gen_y(n: usize, j: usize) -> usize {
    debug_assert!(j < n);
    n + j
}
/// Index of the generator `dxi_j`.
pub fn gen_xi(n: usize, j: usize) -> usize {
    debug_assert!(j < n);
    2 * n + j
}
/// Index of the generator `deta_j`.
pub fn gen_eta(n: usize, j: usize) -> usize {
    debug_assert!(j < n);
    3 * n + j
}

/// Sign of merging two disjoint sorted monomials `a` and `b` into `a | b`:
/// (-1)^{#inversions}, where an inversion is a pair (s in a, t in b) with s > t.
fn merge_sign(a: u32, b: u32) -> f64 {
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let t = rest.trailing_zeros();
        inversions += (a >> (t + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sparse element of the exterior algebra over the 4n generators.
#[derive(Clone, PartialEq)]
pub struct MultiVector {
    n: usize,
    terms: BTreeMap<u32, f64>,
}

impl MultiVector {
    pub fn zero(n: usize) -> Self {
        assert!((1..=MAX_N).contains(&n), "complex dimension out of range");
        MultiVector {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, c: f64) -> Self {
        let mut mv = Self::zero(n);
        mv.add_term(0, c);
        mv
    }

    /// The basis 1-form of generator `g`.
    pub fn generator(n: usize, g: usize) -> Self {
        assert!(g < 4 * n);
        let mut mv = Self::zero(n);
        mv.add_term(1 << g, 1.0);
        mv
    }

    /// A 1-form with the given 4n coefficients in generator order.
    pub fn one_form(n: usize, coeffs: &[f64]) -> Self {
        assert_eq!(coeffs.len(), 4 * n);
        let mut mv = Self::zero(n);
        for (g, &c) in coeffs.iter().enumerate() {
            mv.add_term(1 << g, c);
        }
        mv
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the basis monomial `mask`.
    pub fn coefficient(&self, mask: u32) -> f64 {
        self.terms.get(&mask).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    /// Degree if homogeneous, `None` for mixed or zero elements.
    pub fn degree(&self) -> Option<usize> {
        let mut deg = None;
        for &mask in self.terms.keys() {
            let d = mask.count_ones() as usize;
            match deg {
                None => deg = Some(d),
                Some(k) if k != d => return None,
                _ => {}
            }
        }
        deg
    }

    fn add_term(&mut self, mask: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(mask).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&mask);
        }
    }

    pub fn add(&self, other: &MultiVector) -> Result<MultiVector> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiVector) -> Result<MultiVector> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, t: f64) -> MultiVector {
        let mut out = MultiVector::zero(self.n);
        if t == 0.0 {
            return out;
        }
        for (&m, &c) in &self.terms {
            out.terms.insert(m, t * c);
        }
        out
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    fn check_dim(&self, other: &MultiVector) -> Result<()> {
        if self.n != other.n {
            return Err(VconvError::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    /// Exterior product. Bilinear, graded-anticommutative, associative.
    pub fn wedge(&self, other: &MultiVector) -> Result<MultiVector> {
        self.check_dim(other)?;
        let mut out = MultiVector::zero(self.n);
        for (&ma, &ca) in &self.terms {
            for (&mb, &cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                out.add_term(ma | mb, ca * cb * merge_sign(ma, mb));
            }
        }
        Ok(out)
    }

    /// `self` wedged with itself `p` times (`p = 0` gives the scalar 1).
    pub fn wedge_power(&self, p: usize) -> MultiVector {
        let mut out = MultiVector::scalar(self.n, 1.0);
        for _ in 0..p {
            out = out.wedge(self).expect("same dimension");
        }
        out
    }
}

impl fmt::Debug for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = |g: usize| {
            let n = self.n;
            match g / n {
                0 => format!("dx{}", g % n + 1),
                1 => format!("dy{}", g % n + 1),
                2 => format!("dxi{}", g % n + 1),
                _ => format!("deta{}", g % n + 1),
            }
        };
        let mut first = true;
        for (&m, &c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c:.6}*")?;
            let mut rest = m;
            let mut inner_first = true;
            while rest != 0 {
                let g = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if !inner_first {
                    write!(f, "^")?;
                }
                inner_first = false;
                write!(f, "{}", names(g))?;
            }
        }
        Ok(())
    }
}

/// Tangent vector to T*C^n at a point, with 4n components in generator order.
#[derive(Clone, Debug)]
pub struct TangentVector {
    n: usize,
    components: Vec<f64>,
}

impl TangentVector {
    pub fn new(n: usize, components: Vec<f64>) -> Self {
        assert_eq!(components.len(), 4 * n);
        TangentVector { n, components }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// X_{gamma_1} at base point `z`: the vector field with i_X omega_s = gamma_1.
    pub fn x_gamma1(n: usize, z: &[f64]) -> Self {
        assert_eq!(z.len(), 2 * n);
        let mut c = vec![0.0; 4 * n];
        for j in 0..n {
            c[gen_xi(n, j)] = -z[j];
            c[gen_eta(n, j)] = -z[n + j];
        }
        TangentVector::new(n, c)
    }

    /// X_{beta_1} at base point `z`: the vector field with i_X omega_s = beta_1.
    pub fn x_beta1(n: usize, z: &[f64]) -> Self {
        assert_eq!(z.len(), 2 * n);
        let mut c = vec![0.0; 4 * n];
        for j in 0..n {
            c[gen_x(n, j)] = z[j];
            c[gen_y(n, j)] = z[n + j];
        }
        TangentVector::new(n, c)
    }
}

/// Interior product `i_v a`; an antiderivation of degree -1.
pub fn contract(v: &TangentVector, a: &MultiVector) -> Result<MultiVector> {
    if v.n != a.n {
        return Err(VconvError::DimensionMismatch {
            expected: a.n,
            got: v.n,
        });
    }
    let mut out = MultiVector::zero(a.n);
    for (&mask, &c) in &a.terms {
        let mut rest = mask;
        let mut position_sign = 1.0;
        while rest != 0 {
            let g = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let comp = v.components[g];
            if comp != 0.0 {
                out.add_term(mask & !(1 << g), position_sign * comp * c);
            }
            position_sign = -position_sign;
        }
    }
    Ok(out)
}

/// Base point of T*C^n: `z` holds (x_1..x_n, y_1..y_n) and `zeta` holds
/// (xi_1..xi_n, eta_1..eta_n). The invariant forms only use `z`.
#[derive(Clone, Debug)]
pub struct Point {
    pub n: usize,
    pub z: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl Point {
    pub fn new(n: usize, z: Vec<f64>, zeta: Vec<f64>) -> Self {
        assert_eq!(z.len(), 2 * n);
        assert_eq!(zeta.len(), 2 * n);
        Point { n, z, zeta }
    }

    pub fn origin(n: usize) -> Self {
        Point::new(n, vec![0.0; 2 * n], vec![0.0; 2 * n])
    }

    /// The point z = e_1 (x_1 = 1, everything else 0).
    pub fn e1(n: usize) -> Self {
        let mut z = vec![0.0; 2 * n];
        z[0] = 1.0;
        Point::new(n, z, vec![0.0; 2 * n])
    }

    pub fn z_norm_sq(&self) -> f64 {
        self.z.iter().map(|v| v * v).sum()
    }
}

/// Names of the invariant forms evaluable at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormName {
    Theta0,
    Theta1,
    Theta2,
    OmegaS,
    Gamma1,
    Gamma2,
    Beta1,
    Beta2,
    Omega1,
    Omega2,
    Theta0Prime,
    Theta1Prime,
    Theta2Prime,
}

impl FormName {
    pub const ALL: [FormName; 13] = [
        FormName::Theta0,
        FormName::Theta1,
        FormName::Theta2,
        FormName::OmegaS,
        FormName::Gamma1,
        FormName::Gamma2,
        FormName::Beta1,
        FormName::Beta2,
        FormName::Omega1,
        FormName::Omega2,
        FormName::Theta0Prime,
        FormName::Theta1Prime,
        FormName::Theta2Prime,
    ];

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "theta0" => FormName::Theta0,
            "theta1" => FormName::Theta1,
            "theta2" => FormName::Theta2,
            "omega_s" => FormName::OmegaS,
            "gamma1" => FormName::Gamma1,
            "gamma2" => FormName::Gamma2,
            "beta1" => FormName::Beta1,
            "beta2" => FormName::Beta2,
            "omega1" => FormName::Omega1,
            "omega2" => FormName::Omega2,
            "theta0p" => FormName::Theta0Prime,
            "theta1p" => FormName::Theta1Prime,
            "theta2p" => FormName::Theta2Prime,
            other => return Err(VconvError::UnknownForm(other.to_string())),
        })
    }
}

/// theta_0 = sum_j dx_j ^ dy_j.
pub fn theta0(n: usize) -> MultiVector {
    let mut mv = MultiVector::zero(n);
    for j in 0..n {
        mv.add_term(1 << gen_x(n, j) | 1 << gen_y(n, j), 1.0);
    }
    mv
}

/// theta_1 = sum_j dx_j ^ deta_j - dy_j ^ dxi_j.
pub fn theta1(n: usize) -> MultiVector {
    let mut mv = MultiVector::zero(n);
    for j in 0..n {
        mv.add_term(1 << gen_x(n, j) | 1 << gen_eta(n, j), 1.0);
        mv.add_term(1 << gen_y(n, j) | 1 << gen_xi(n, j), -1.0);
    }
    mv
}

/// theta_2 = sum_j dxi_j ^ deta_j.
pub fn theta2(n: usize) -> MultiVector {
    let mut mv = MultiVector::zero(n);
    for j in 0..n {
        mv.add_term(1 << gen_xi(n, j) | 1 << gen_eta(n, j), 1.0);
    }
    mv
}

/// The symplectic form omega_s = sum_j dx_j ^ dxi_j + dy_j ^ deta_j.
pub fn omega_s(n: usize) -> MultiVector {
    let mut mv = MultiVector::zero(n);
    for j in 0..n {
        mv.add_term(1 << gen_x(n, j) | 1 << gen_xi(n, j), 1.0);
        mv.add_term(1 << gen_y(n, j) | 1 << gen_eta(n, j), 1.0);
    }
    mv
}

/// Evaluate an invariant form at a point. The constant forms ignore the point;
/// the gamma/beta family is linear in the base coordinates of `z`.
pub fn invariant_form(name: FormName, point: &Point) -> MultiVector {
    let n = point.n;
    let z = &point.z;
    let lin = |xi_like: bool, rotated: bool| -> MultiVector {
        // gamma_1 = sum x_j dx_j + y_j dy_j     (base block, not rotated)
        // gamma_2 = sum x_j dy_j - y_j dx_j     (base block, rotated)
        // beta_1  = sum x_j dxi_j + y_j deta_j  (fiber block, not rotated)
        // beta_2  = sum x_j deta_j - y_j dxi_j  (fiber block, rotated)
        let mut c = vec![0.0; 4 * n];
        for j in 0..n {
            let (gj, gnj) = if xi_like {
                (gen_xi(n, j), gen_eta(n, j))
            } else {
                (gen_x(n, j), gen_y(n, j))
            };
            if rotated {
                c[gnj] += z[j];
                c[gj] -= z[n + j];
            } else {
                c[gj] += z[j];
                c[gnj] += z[n + j];
            }
        }
        MultiVector::one_form(n, &c)
    };
    let zsq = point.z_norm_sq();
    match name {
        FormName::Theta0 => theta0(n),
        FormName::Theta1 => theta1(n),
        FormName::Theta2 => theta2(n),
        FormName::OmegaS => omega_s(n),
        FormName::Gamma1 => lin(false, false),
        FormName::Gamma2 => lin(false, true),
        FormName::Beta1 => lin(true, false),
        FormName::Beta2 => lin(true, true),
        FormName::Omega1 => {
            // omega_1 = gamma_1 ^ beta_1 + gamma_2 ^ beta_2
            let g1 = lin(false, false);
            let g2 = lin(false, true);
            let b1 = lin(true, false);
            let b2 = lin(true, true);
            g1.wedge(&b1)
                .and_then(|a| g2.wedge(&b2).and_then(|b| a.add(&b)))
                .expect("same dimension")
        }
        FormName::Omega2 => {
            // omega_2 = |z|^2 omega_s - omega_1
            let om1 = invariant_form(FormName::Omega1, point);
            omega_s(n).scale(zsq).sub(&om1).expect("same dimension")
        }
        FormName::Theta0Prime => {
            // theta'_0 = |z|^2 theta_0 - gamma_1 ^ gamma_2
            let g1g2 = lin(false, false).wedge(&lin(false, true)).unwrap();
            theta0(n).scale(zsq).sub(&g1g2).unwrap()
        }
        FormName::Theta1Prime => {
            // theta'_1 = |z|^2 theta_1 - (gamma_1 ^ beta_2 - gamma_2 ^ beta_1)
            let g1b2 = lin(false, false).wedge(&lin(true, true)).unwrap();
            let g2b1 = lin(false, true).wedge(&lin(true, false)).unwrap();
            theta1(n)
                .scale(zsq)
                .sub(&g1b2)
                .and_then(|a| a.add(&g2b1))
                .unwrap()
        }
        FormName::Theta2Prime => {
            // theta'_2 = |z|^2 theta_2 - beta_1 ^ beta_2
            let b1b2 = lin(true, false).wedge(&lin(true, true)).unwrap();
            theta2(n).scale(zsq).sub(&b1b2).unwrap()
        }
    }
}

/// theta^m_{k,q} = theta_0^{m-k+q} ^ theta_1^{k-2q} ^ theta_2^q in the ambient
/// algebra over C^n; zero when (m, k, q) violate
/// `0 <= k <= 2m`, `max(0, k-m) <= q <= floor(k/2)`.
///
/// The superscript `m` and the ambient dimension `n` coincide for the top-level
/// forms but differ inside the Upsilon family, which mixes superscript n-1
/// blocks into the algebra over C^n.
pub fn theta_kq_in(n: usize, m: i64, k: i64, q: i64) -> MultiVector {
    if k < 0 || k > 2 * m || q < (k - m).max(0) || 2 * q > k {
        return MultiVector::zero(n);
    }
    let a = (m - k + q) as usize;
    let b = (k - 2 * q) as usize;
    let c = q as usize;
    theta0(n)
        .wedge_power(a)
        .wedge(&theta1(n).wedge_power(b))
        .and_then(|t| t.wedge(&theta2(n).wedge_power(c)))
        .expect("same dimension")
}

/// theta^n_{k,q} over C^n (superscript equals the ambient dimension).
pub fn theta_kq(n: usize, k: i64, q: i64) -> MultiVector {
    theta_kq_in(n, n as i64, k, q)
}

/// c_{n,k,q} = 1 / ((n-k+q)! q! (k-2q)!), the normalization of the Theta and
/// Upsilon forms. Panics if the indices are outside the valid range.
pub fn c_nkq(n: usize, k: usize, q: usize) -> f64 {
    let n = n as i64;
    let k = k as i64;
    let q = q as i64;
    assert!(q >= (k - n).max(0) && 2 * q <= k, "c_nkq indices out of range");
    1.0 / (factorial(n - k + q) * factorial(q) * factorial(k - 2 * q))
}

pub fn factorial(m: i64) -> f64 {
    assert!(m >= 0);
    (1..=m).map(|i| i as f64).product()
}

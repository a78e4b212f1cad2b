//! Abel transforms (single, iterated, inverse), radial Fourier/Laplace
//! reduction, the entire function e(z) with e(z^2) = cos z, and the
//! reconstruction of the Goodey-Weil transform on the real slice from the
//! densities of the restrictions to the extremal subspaces.

use crate::error::{Result, VconvError};
use crate::mixed::VectorTuple;
use crate::polynomials::{p_kq, symbol_beta, symbol_gamma};
use crate::quadrature::integrate_1d;
use crate::valuation::{RadialDensity, SmoothValuationSpec, ValuationTerm};
use num_complex::Complex64;
use std::sync::Arc;

/// A compactly supported radial profile on [0, infinity).
///
/// `deriv` defaults to a central difference; implementations with exact
/// derivatives should override it.
pub trait Profile: Send + Sync {
    fn eval(&self, r: f64) -> f64;

    /// Support radius: eval vanishes at and beyond it.
    fn radius(&self) -> f64;

    fn deriv(&self, r: f64) -> f64 {
        let h = 1e-6 * self.radius().max(1.0);
        let lo = (r - h).max(0.0);
        let hi = r + h;
        (self.eval(hi) - self.eval(lo)) / (hi - lo)
    }
}

/// The zero profile (used for absent density slots).
pub struct ZeroProfile {
    pub radius: f64,
}

impl Profile for ZeroProfile {
    fn eval(&self, _r: f64) -> f64 {
        0.0
    }
    fn radius(&self) -> f64 {
        self.radius
    }
    fn deriv(&self, _r: f64) -> f64 {
        0.0
    }
}

/// Spatial profile of a bump density in the t = |z|^2 variable:
/// r -> density(r^2), supported in [0, sqrt(R_t)].
pub struct SpatialBump {
    density: RadialDensity,
}

impl SpatialBump {
    pub fn new(density: RadialDensity) -> Self {
        SpatialBump { density }
    }
}

impl Profile for SpatialBump {
    fn eval(&self, r: f64) -> f64 {
        self.density.eval(r * r)
    }
    fn radius(&self) -> f64 {
        self.density.spatial_radius()
    }
    fn deriv(&self, r: f64) -> f64 {
        2.0 * r * self.density.deriv(r * r)
    }
}

/// Profile from closures, for tests and ad-hoc inputs.
pub struct FnProfile<F, G> {
    pub f: F,
    pub df: G,
    pub radius: f64,
}

impl<F, G> Profile for FnProfile<F, G>
where
    F: Fn(f64) -> f64 + Send + Sync,
    G: Fn(f64) -> f64 + Send + Sync,
{
    fn eval(&self, r: f64) -> f64 {
        if r >= self.radius {
            0.0
        } else {
            (self.f)(r)
        }
    }
    fn radius(&self) -> f64 {
        self.radius
    }
    fn deriv(&self, r: f64) -> f64 {
        if r >= self.radius {
            0.0
        } else {
            (self.df)(r)
        }
    }
}

/// Surface measure of the unit sphere S^{m-1} in R^m.
pub fn sphere_surface(m: usize) -> f64 {
    // 2 pi^{m/2} / Gamma(m/2), by the half-integer Gamma recurrence
    let mut gamma_half = if m.is_multiple_of(2) {
        1.0 // Gamma(1)
    } else {
        std::f64::consts::PI.sqrt() // Gamma(1/2)
    };
    let mut arg = if m.is_multiple_of(2) { 1.0 } else { 0.5 };
    while arg < m as f64 / 2.0 - 1e-9 {
        gamma_half *= arg;
        arg += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(m as f64 / 2.0) / gamma_half
}

/// Default 1-D quadrature order for the transform integrals.
pub const DEFAULT_ORDER: usize = 64;

/// m-fold Abel transform as a single radial integral:
/// A^m(phi)(t) = vol(S^{m-1}) int_0^inf phi(sqrt(t^2 + s^2)) s^{m-1} ds,
/// with A^0 the identity.
pub fn abel_m_with_order(phi: &dyn Profile, m: usize, t: f64, order: usize) -> f64 {
    if m == 0 {
        return phi.eval(t);
    }
    let radius = phi.radius();
    if t >= radius {
        return 0.0;
    }
    let smax = (radius * radius - t * t).max(0.0).sqrt();
    let surface = sphere_surface(m);
    surface
        * integrate_1d(order, 0.0, smax, |s| {
            phi.eval((t * t + s * s).sqrt()) * s.powi(m as i32 - 1)
        })
}

pub fn abel_m(phi: &dyn Profile, m: usize, t: f64) -> f64 {
    abel_m_with_order(phi, m, t, DEFAULT_ORDER)
}

/// The Abel transform A(phi)(t) = int_R phi(sqrt(t^2 + s^2)) ds.
pub fn abel(phi: &dyn Profile, t: f64) -> f64 {
    abel_m(phi, 1, t)
}

/// Inverse Abel transform, with the endpoint singularity removed by the
/// substitution s = sqrt(t^2 + u^2):
/// A^{-1}(psi)(t) = -(1/pi) int_t^inf psi'(s) / sqrt(s^2 - t^2) ds
///               = -(1/pi) int_0^umax psi'(sqrt(t^2 + u^2)) / sqrt(t^2 + u^2) du.
pub fn abel_inverse_with_order(psi: &dyn Profile, t: f64, order: usize) -> f64 {
    let radius = psi.radius();
    if t >= radius {
        return 0.0;
    }
    let umax = (radius * radius - t * t).max(0.0).sqrt();
    -(1.0 / std::f64::consts::PI)
        * integrate_1d(order, 0.0, umax, |u| {
            let s = (t * t + u * u).sqrt();
            if s == 0.0 {
                0.0
            } else {
                psi.deriv(s) / s
            }
        })
}

pub fn abel_inverse(psi: &dyn Profile, t: f64) -> f64 {
    abel_inverse_with_order(psi, t, DEFAULT_ORDER)
}

/// The m-fold Abel transform of a profile, itself as a profile. Derivatives
/// differentiate under the integral sign, so the result feeds the inverse
/// transform without finite differences.
pub struct AbelOf {
    inner: Arc<dyn Profile>,
    m: usize,
    order: usize,
}

impl AbelOf {
    pub fn new(inner: Arc<dyn Profile>, m: usize, order: usize) -> Self {
        AbelOf { inner, m, order }
    }
}

impl Profile for AbelOf {
    fn eval(&self, r: f64) -> f64 {
        abel_m_with_order(self.inner.as_ref(), self.m, r, self.order)
    }
    fn radius(&self) -> f64 {
        self.inner.radius()
    }
    fn deriv(&self, r: f64) -> f64 {
        if self.m == 0 {
            return self.inner.deriv(r);
        }
        let radius = self.inner.radius();
        if r >= radius {
            return 0.0;
        }
        let smax = (radius * radius - r * r).max(0.0).sqrt();
        sphere_surface(self.m)
            * integrate_1d(self.order, 0.0, smax, |s| {
                let rho = (r * r + s * s).sqrt();
                if rho == 0.0 {
                    0.0
                } else {
                    self.inner.deriv(rho) * r / rho * s.powi(self.m as i32 - 1)
                }
            })
    }
}

/// Frequency kind for the radial Fourier reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreqKind {
    /// exp(i <w, .>): the value is real (cosine transform) for even profiles.
    Oscillatory,
    /// exp(<y, .>): the real Laplace slice w = -i y.
    Exponential,
}

/// Fourier (or Laplace, on the real slice) transform of the radial function
/// z -> phi(|z|) on R^dim, reduced by iterated Abel transforms to a single
/// line integral. The value depends only on |w|.
pub fn radial_fourier(phi: &dyn Profile, dim: usize, w: &[f64], kind: FreqKind) -> Complex64 {
    let freq = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    radial_fourier_freq(phi, dim, freq, kind, DEFAULT_ORDER)
}

/// Radial Fourier/Laplace value at scalar frequency |w|.
pub fn radial_fourier_freq(
    phi: &dyn Profile,
    dim: usize,
    freq: f64,
    kind: FreqKind,
    order: usize,
) -> Complex64 {
    let radius = phi.radius();
    let line = move |t: f64| abel_m_with_order(phi, dim - 1, t, order);
    let value = match kind {
        FreqKind::Oscillatory => {
            2.0 * integrate_1d(order, 0.0, radius, |t| line(t) * (freq * t).cos())
        }
        FreqKind::Exponential => {
            2.0 * integrate_1d(order, 0.0, radius, |t| line(t) * (freq * t).cosh())
        }
    };
    Complex64::new(value, 0.0)
}

/// Direct full-dimensional tensor quadrature of the same transform, used as
/// the independent oracle for the Abel reduction.
pub fn radial_fourier_direct(
    phi: &dyn Profile,
    dim: usize,
    w: &[f64],
    kind: FreqKind,
    order: usize,
) -> Complex64 {
    assert_eq!(w.len(), dim);
    let grid = crate::quadrature::TensorGrid::new(dim, order, phi.radius());
    let mut point = vec![0.0; dim];
    let mut acc = Complex64::new(0.0, 0.0);
    for idx in 0..grid.len() {
        let weight = grid.node(idx, &mut point);
        let r = point.iter().map(|v| v * v).sum::<f64>().sqrt();
        let pv = phi.eval(r);
        if pv == 0.0 {
            continue;
        }
        let dot: f64 = w.iter().zip(&point).map(|(a, b)| a * b).sum();
        let kernel = match kind {
            FreqKind::Oscillatory => Complex64::new(dot.cos(), dot.sin()),
            FreqKind::Exponential => Complex64::new(dot.exp(), 0.0),
        };
        acc += weight * pv * kernel;
    }
    acc
}

/// The entire function e(z) = sum (-1)^m z^m / (2m)!, i.e. e(z^2) = cos z and
/// e(-x^2) = cosh x, by adaptively truncated series.
pub fn e_function(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for m in 0..200 {
        let denom = ((2 * m + 1) * (2 * m + 2)) as f64;
        term *= -z / denom;
        sum += term;
        if term.norm() < 1e-18 * (1.0 + sum.norm()) {
            break;
        }
    }
    sum
}

/// The pair of restriction densities (a_q, b_q) of a valuation on the
/// extremal subspace E_{k,q}: continuous compactly supported profiles with
/// a_q(0) = b_q(0) and a common support radius.
pub struct DensityPair {
    a: Arc<dyn Profile>,
    b: Arc<dyn Profile>,
}

impl DensityPair {
    pub fn new(a: Arc<dyn Profile>, b: Arc<dyn Profile>) -> Result<Self> {
        if (a.radius() - b.radius()).abs() > 1e-12 * a.radius().max(1.0) {
            return Err(VconvError::InvalidArgument(
                "density pair must share one support radius".into(),
            ));
        }
        let a0 = a.eval(0.0);
        let b0 = b.eval(0.0);
        if (a0 - b0).abs() > 1e-8 * (1.0 + a0.abs().max(b0.abs())) {
            return Err(VconvError::InvalidArgument(format!(
                "density pair must agree at 0: a(0) = {a0:.6e}, b(0) = {b0:.6e}"
            )));
        }
        Ok(DensityPair { a, b })
    }

    pub fn a(&self, s: f64) -> f64 {
        self.a.eval(s)
    }

    pub fn b(&self, s: f64) -> f64 {
        self.b.eval(s)
    }

    pub fn radius(&self) -> f64 {
        self.a.radius()
    }

    pub fn a_profile(&self) -> Arc<dyn Profile> {
        self.a.clone()
    }

    pub fn b_profile(&self) -> Arc<dyn Profile> {
        self.b.clone()
    }
}

/// Densities of the restriction of a Theta/Upsilon-form valuation to E_{k,q}:
/// with the spatial profiles phi~(t) = phi_q(t^2), psi~(t) = psi_q(t^2),
///
///   a_q = A^{2n-k}(phi~) + (s^2 / q)        A^{2n-k}(psi~)   (0 < q < k/2)
///   b_q = A^{2n-k}(phi~) - (2 t^2 / (k-2q)) A^{2n-k}(psi~)
///
/// and both reduce to A^{2n-k}(phi~) when q = 0 or q = k/2 (no psi term).
pub fn densities_from_spec(
    spec: &SmoothValuationSpec,
    q: usize,
    order: usize,
) -> Result<DensityPair> {
    let n = spec.n();
    let k = spec.degree();
    if q < k.saturating_sub(n) || 2 * q > k {
        return Err(VconvError::IndexOutOfRange(format!(
            "q = {q} outside the admissible range for n = {n}, k = {k}"
        )));
    }
    let mut phi: Option<RadialDensity> = None;
    let mut psi: Option<RadialDensity> = None;
    for term in spec.terms() {
        match term {
            ValuationTerm::Theta { q: tq, density } if *tq == q => {
                if phi.is_some() {
                    return Err(VconvError::InvalidArgument(
                        "duplicate Theta term at one q".into(),
                    ));
                }
                phi = Some(density.clone());
            }
            ValuationTerm::Upsilon { q: tq, density } if *tq == q => {
                if psi.is_some() {
                    return Err(VconvError::InvalidArgument(
                        "duplicate Upsilon term at one q".into(),
                    ));
                }
                psi = Some(density.clone());
            }
            ValuationTerm::Raw { .. } => {
                return Err(VconvError::InvalidArgument(
                    "restriction densities need the valuation in Theta/Upsilon form".into(),
                ));
            }
            _ => {}
        }
    }
    let radius = spec.spatial_radius();
    let m = 2 * n - k;
    let abel_phi: Arc<dyn Profile> = match phi {
        Some(d) => Arc::new(AbelOf::new(Arc::new(SpatialBump::new(d)), m, order)),
        None => Arc::new(ZeroProfile { radius }),
    };
    let abel_psi: Option<Arc<dyn Profile>> = psi.map(|d| {
        Arc::new(AbelOf::new(Arc::new(SpatialBump::new(d)), m, order)) as Arc<dyn Profile>
    });

    struct Combined {
        base: Arc<dyn Profile>,
        extra: Option<(f64, Arc<dyn Profile>)>,
        radius: f64,
    }
    impl Profile for Combined {
        fn eval(&self, s: f64) -> f64 {
            let mut v = self.base.eval(s);
            if let Some((c, p)) = &self.extra {
                v += c * s * s * p.eval(s);
            }
            v
        }
        fn radius(&self) -> f64 {
            self.radius
        }
    }

    let a: Arc<dyn Profile> = Arc::new(Combined {
        base: abel_phi.clone(),
        extra: abel_psi.clone().map(|p| (1.0 / q as f64, p)),
        radius,
    });
    let b: Arc<dyn Profile> = Arc::new(Combined {
        base: abel_phi,
        extra: abel_psi.map(|p| (-2.0 / (k - 2 * q) as f64, p)),
        radius,
    });
    DensityPair::new(a, b)
}

/// Per-q entire-function evaluators Phi_q, Psi_q assembled from restriction
/// densities, together with the quadrature order used for their defining
/// integrals.
pub struct ReconstructionData {
    n: usize,
    k: usize,
    order: usize,
    /// (q, radial integrand of Phi_q)
    phi_lines: Vec<(usize, Arc<dyn Profile>)>,
    /// (q, radial integrand of Psi_q); only for max(1, k-n) <= q < k/2
    psi_lines: Vec<(usize, Arc<dyn Profile>)>,
}

impl ReconstructionData {
    /// Build the evaluators from density pairs on the admissible q-grid.
    ///
    /// Phi_q integrates A^{k-1}(2q a_q + (k-2q) b_q) / k against e(t^2 z);
    /// Psi_q integrates (q(k-2q)/k) A^{k-1}((a_q - b_q)/t^2), whose integrand
    /// is Abel-integrable for k >= 3 (for k <= 2 no interior q exists).
    pub fn from_pairs(
        n: usize,
        k: usize,
        pairs: &[(usize, DensityPair)],
        order: usize,
    ) -> Result<Self> {
        let mut phi_lines = Vec::new();
        let mut psi_lines = Vec::new();
        for (q, pair) in pairs {
            let q = *q;
            if q < k.saturating_sub(n) || 2 * q > k {
                return Err(VconvError::IndexOutOfRange(format!(
                    "density pair at q = {q} outside the admissible range (n={n}, k={k})"
                )));
            }
            let radius = pair.radius();

            struct PhiIntegrand {
                q: f64,
                k: f64,
                a: Arc<dyn Profile>,
                b: Arc<dyn Profile>,
                radius: f64,
            }
            impl Profile for PhiIntegrand {
                fn eval(&self, s: f64) -> f64 {
                    (2.0 * self.q * self.a.eval(s) + (self.k - 2.0 * self.q) * self.b.eval(s))
                        / self.k
                }
                fn radius(&self) -> f64 {
                    self.radius
                }
            }
            let phi_integrand: Arc<dyn Profile> = Arc::new(PhiIntegrand {
                q: q as f64,
                k: k as f64,
                a: pair.a_profile(),
                b: pair.b_profile(),
                radius,
            });
            phi_lines.push((
                q,
                Arc::new(AbelOf::new(phi_integrand, k - 1, order)) as Arc<dyn Profile>,
            ));

            let interior = q >= 1 && 2 * q < k && q >= k.saturating_sub(n);
            if interior {
                if k < 3 {
                    return Err(VconvError::InvalidArgument(
                        "interior q needs k >= 3 for the integrable quotient".into(),
                    ));
                }
                // (a - b)/s^2 is bounded since a(0) = b(0); the series-safe
                // branch freezes the quotient below s = 1e-4
                struct Quotient {
                    scale: f64,
                    a: Arc<dyn Profile>,
                    b: Arc<dyn Profile>,
                    radius: f64,
                }
                impl Profile for Quotient {
                    fn eval(&self, s: f64) -> f64 {
                        let s_eff = s.max(1e-4);
                        self.scale * (self.a.eval(s_eff) - self.b.eval(s_eff)) / (s_eff * s_eff)
                    }
                    fn radius(&self) -> f64 {
                        self.radius
                    }
                }
                let quotient: Arc<dyn Profile> = Arc::new(Quotient {
                    scale: q as f64 * (k - 2 * q) as f64 / k as f64,
                    a: pair.a_profile(),
                    b: pair.b_profile(),
                    radius,
                });
                psi_lines.push((
                    q,
                    Arc::new(AbelOf::new(quotient, k - 1, order)) as Arc<dyn Profile>,
                ));
            }
        }
        Ok(ReconstructionData {
            n,
            k,
            order,
            phi_lines,
            psi_lines,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Phi_q(z) = (1/k) int_R A^{k-1}(2q a_q + (k-2q) b_q)[|t|] e(t^2 z) dt.
    pub fn phi(&self, q: usize, z: Complex64) -> Complex64 {
        match self.phi_lines.iter().find(|(pq, _)| *pq == q) {
            Some((_, line)) => line_transform(line.as_ref(), z, self.order),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Psi_q(z) = (q(k-2q)/k) int_R A^{k-1}((a_q - b_q)/|.|^2)[|t|] e(t^2 z) dt.
    pub fn psi(&self, q: usize, z: Complex64) -> Complex64 {
        match self.psi_lines.iter().find(|(pq, _)| *pq == q) {
            Some((_, line)) => line_transform(line.as_ref(), z, self.order),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Laplace-slice derivatives of the radial function G(r) = Psi~_q(-i u),
    /// |u| = r: returns the three moment integrals needed by the operator
    /// action, evaluated stably near r = 0.
    fn psi_operator_moments(&self, q: usize, r: f64) -> Option<(f64, f64)> {
        let (_, line) = self.psi_lines.iter().find(|(pq, _)| *pq == q)?;
        // trace part: 2 int g(t) t^2 sinhc(tr) dt
        // quadratic part: 2 int g(t) t^4 h(tr) dt, h(x) = (cosh x - sinhc x)/x^2
        let radius = line.radius();
        let trace_part = 2.0
            * integrate_1d(self.order, 0.0, radius, |t| {
                line.eval(t) * t * t * sinhc(t * r)
            });
        let quad_part = 2.0
            * integrate_1d(self.order, 0.0, radius, |t| {
                line.eval(t) * t.powi(4) * cosh_sinhc_quot(t * r)
            });
        Some((trace_part, quad_part))
    }
}

fn line_transform(line: &dyn Profile, z: Complex64, order: usize) -> Complex64 {
    let radius = line.radius();
    let mut acc = Complex64::new(0.0, 0.0);
    let (xs, ws) = crate::quadrature::gauss_legendre_on(order, 0.0, radius);
    for (&t, &w) in xs.iter().zip(&ws) {
        acc += w * line.eval(t) * e_function(t * t * z);
    }
    2.0 * acc
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sinh() / x
    }
}

/// (cosh x - sinh x / x) / x^2, the stable kernel of the quadratic part.
fn cosh_sinhc_quot(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        1.0 / 3.0 + x * x / 30.0 + x.powi(4) / 840.0
    } else {
        (x.cosh() - x.sinh() / x) / (x * x)
    }
}

/// Reconstruction of the Goodey-Weil transform on the real slice
/// (w_j = -i y_j) from the restriction densities:
///
/// value = (1/k!) [ sum_q P_{k,q}(y) Phi_q(-|u|^2)
///                + sum_q ((1/q) D_beta - (2/(k-2q)) D_gamma) Psi~_q (u) ],
///
/// u = sum_j y_j. The operator action on Psi~_q is realized as multiplication
/// by the symbol inside the transform integral; on the radial Laplace slice
/// that reduces to the two stable moment integrals
///   trace(S) * t^2 sinhc(t|u|) + S(u) * t^4 (cosh - sinhc)(t|u|)/(t|u|)^2
/// against the Psi_q line integrand. Everything is real on this slice.
pub fn reconstruct_gw(data: &ReconstructionData, ys: &[Vec<f64>]) -> Result<f64> {
    let n = data.n;
    let k = data.k;
    if ys.len() != k {
        return Err(VconvError::InvalidArgument(format!(
            "reconstruction of a degree-{k} transform needs {k} arguments, got {}",
            ys.len()
        )));
    }
    let w = VectorTuple::new(n, ys.to_vec())?;
    let mut u = vec![0.0; 2 * n];
    for y in ys {
        for (a, b) in u.iter_mut().zip(y) {
            *a += b;
        }
    }
    let r = u.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut total = 0.0;
    for (q, _) in &data.phi_lines {
        let p = p_kq(&w, *q as i64)?;
        if p == 0.0 {
            continue;
        }
        let phi_val = data.phi(*q, Complex64::new(-r * r, 0.0));
        total += p * phi_val.re;
    }
    for (q, _) in &data.psi_lines {
        let q = *q;
        let (trace_part, quad_part) = data
            .psi_operator_moments(q, r)
            .expect("moment integrals exist for stored q");
        // symbol traces and values at u for both operator families
        let mut op_val = 0.0;
        for (family, coeff) in [(SymbolFamily::Beta, 1.0 / q as f64), (
            SymbolFamily::Gamma,
            -2.0 / (k - 2 * q) as f64,
        )] {
            let s_u = eval_symbol(family, &w, q as i64, &u)?;
            let mut trace = 0.0;
            for alpha in 0..2 * n {
                let mut e_alpha = vec![0.0; 2 * n];
                e_alpha[alpha] = 1.0;
                trace += eval_symbol(family, &w, q as i64, &e_alpha)?;
            }
            op_val += coeff * (trace * trace_part + s_u * quad_part);
        }
        total += op_val;
    }
    Ok(total / crate::exterior::factorial(k as i64))
}

#[derive(Clone, Copy)]
enum SymbolFamily {
    Beta,
    Gamma,
}

fn eval_symbol(family: SymbolFamily, w: &VectorTuple, q: i64, z: &[f64]) -> Result<f64> {
    match family {
        SymbolFamily::Beta => symbol_beta(w, q, z),
        SymbolFamily::Gamma => symbol_gamma(w, q, z),
    }
}

impl Clone for ReconstructionData {
    fn clone(&self) -> Self {
        ReconstructionData {
            n: self.n,
            k: self.k,
            order: self.order,
            phi_lines: self.phi_lines.clone(),
            psi_lines: self.psi_lines.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::RadialDensity;

    fn parabola_profile() -> FnProfile<impl Fn(f64) -> f64, impl Fn(f64) -> f64> {
        FnProfile {
            f: |r: f64| (1.0 - r * r).max(0.0),
            df: |r: f64| if r < 1.0 { -2.0 * r } else { 0.0 },
            radius: 1.0,
        }
    }

    #[test]
    fn abel_of_zero_is_zero() {
        let z = ZeroProfile { radius: 1.0 };
        assert_eq!(abel(&z, 0.3), 0.0);
        assert_eq!(abel_inverse_with_order(&z, 0.3, 64), 0.0);
    }

    #[test]
    fn densities_without_psi_coincide() {
        use crate::valuation::SmoothValuationSpec;
        let phi = RadialDensity::damped(1.0, 2).unwrap();
        let spec = SmoothValuationSpec::theta_family(2, 2, 1, phi).unwrap();
        let pair = densities_from_spec(&spec, 1, 64).unwrap();
        for i in 0..=10 {
            let s = pair.radius() * i as f64 / 10.0;
            assert_eq!(pair.a(s), pair.b(s));
        }
        // q outside the admissible range is rejected
        assert!(densities_from_spec(&spec, 2, 64).is_err());
    }

    #[test]
    fn reconstruction_of_zero_densities_vanishes() {
        let radius = 1.0;
        let zero_pair = || {
            DensityPair::new(
                Arc::new(ZeroProfile { radius }),
                Arc::new(ZeroProfile { radius }),
            )
            .unwrap()
        };
        let pairs = vec![(1usize, zero_pair())];
        let data = ReconstructionData::from_pairs(2, 3, &pairs, 48).unwrap();
        // out-of-range q is rejected up front
        assert!(ReconstructionData::from_pairs(2, 3, &[(0usize, zero_pair())], 48).is_err());
        let ys = vec![
            vec![0.4, -0.2, 0.1, 0.6],
            vec![-0.3, 0.5, 0.2, 0.1],
            vec![0.2, 0.2, -0.4, 0.3],
        ];
        assert_eq!(reconstruct_gw(&data, &ys).unwrap(), 0.0);
        // wrong tuple length is rejected
        assert!(reconstruct_gw(&data, &ys[..2]).is_err());
    }

    #[test]
    fn abel_of_truncated_parabola() {
        // A((1-r^2)_+)(t) = (4/3)(1-t^2)^{3/2} for t <= 1 (exact integral).
        let p = parabola_profile();
        for t in [0.0, 0.2, 0.5, 0.9] {
            let got = abel(&p, t);
            let want = 4.0 / 3.0 * (1.0 - t * t).powf(1.5);
            assert!((got - want).abs() < 1e-12, "t={t}: {got} vs {want}");
        }
        assert_eq!(abel(&p, 1.2), 0.0);
    }

    #[test]
    fn abel_m_matches_composition() {
        let p = Arc::new(parabola_profile());
        let once = Arc::new(AbelOf::new(p.clone(), 1, 96));
        for t in [0.05, 0.3, 0.6, 0.85] {
            let twice_direct = abel_m_with_order(p.as_ref(), 2, t, 96);
            let composed = abel_m_with_order(once.as_ref(), 1, t, 96);
            assert!(
                (twice_direct - composed).abs() < 1e-8 * (1.0 + twice_direct.abs()),
                "t={t}: {twice_direct} vs {composed}"
            );
        }
    }

    #[test]
    fn abel_roundtrip_on_smooth_bump() {
        let bump = RadialDensity::bump(1.0, vec![1.0, 0.4]).unwrap();
        let p: Arc<dyn Profile> = Arc::new(SpatialBump::new(bump));
        let forward = Arc::new(AbelOf::new(p.clone(), 1, 128));
        for t in [0.0, 0.1, 0.35, 0.6, 0.9] {
            let back = abel_inverse_with_order(forward.as_ref(), t, 128);
            let want = p.eval(t);
            assert!(
                (back - want).abs() < 1e-6,
                "roundtrip t={t}: {back} vs {want}"
            );
        }
    }

    #[test]
    fn abel_gaussian_analytic_identity() {
        // A(exp(-r^2))(t) = sqrt(pi) exp(-t^2); support truncated at r = 12
        // where the Gaussian is below 1e-60.
        let g = FnProfile {
            f: |r: f64| (-r * r).exp(),
            df: |r: f64| -2.0 * r * (-r * r).exp(),
            radius: 12.0,
        };
        for t in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let got = abel_m_with_order(&g, 1, t, 200);
            let want = std::f64::consts::PI.sqrt() * (-t * t).exp();
            assert!(
                (got - want).abs() < 1e-10,
                "abel t={t}: {got} vs {want}"
            );
        }
        // inverse recovers the Gaussian on [0, 3]
        let forward = AbelOf::new(Arc::new(g), 1, 200);
        for t in [0.0, 0.7, 1.5, 2.4, 3.0] {
            let back = abel_inverse_with_order(&forward, t, 200);
            let want = (-t * t).exp();
            assert!((back - want).abs() < 1e-5, "inverse t={t}: {back} vs {want}");
        }
    }

    #[test]
    fn abel_linearity_and_positivity() {
        let bump = RadialDensity::bump(1.0, vec![1.0]).unwrap();
        let p: Arc<dyn Profile> = Arc::new(SpatialBump::new(bump));
        for m in 1..=4usize {
            for t in [0.1, 0.4, 0.8] {
                assert!(abel_m(p.as_ref(), m, t) >= 0.0);
            }
        }
    }

    #[test]
    fn e_function_values() {
        assert!((e_function(Complex64::new(0.0, 0.0)).re - 1.0).abs() < 1e-15);
        let quarter_pi_sq = std::f64::consts::FRAC_PI_2.powi(2);
        assert!(e_function(Complex64::new(quarter_pi_sq, 0.0)).re.abs() < 1e-12);
        let coshed = e_function(Complex64::new(-1.0, 0.0)).re;
        assert!((coshed - 1.0f64.cosh()).abs() < 1e-12);
        assert!((coshed - 1.5430806348152437).abs() < 1e-10);
        // complex argument: e((x + iy)^2) = cos(x + iy)
        let z = Complex64::new(0.7, -0.4);
        let got = e_function(z * z);
        let want = z.cos();
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn radial_fourier_at_zero_is_total_integral() {
        let bump = RadialDensity::bump(1.0, vec![1.0]).unwrap();
        let p = SpatialBump::new(bump);
        let total = radial_fourier(&p, 4, &[0.0; 4], FreqKind::Oscillatory).re;
        let direct = integrate_1d(128, 0.0, 1.0, |r| {
            sphere_surface(4) * r * r * r * p.eval(r)
        });
        assert!((total - direct).abs() < 1e-9 * direct.abs());
    }

    #[test]
    fn radial_fourier_reduction_matches_direct() {
        let bump = RadialDensity::bump(1.0, vec![1.0, -0.2]).unwrap();
        let p = SpatialBump::new(bump);
        for (freq_vec, kind) in [
            (vec![1.3, 0.4, -0.7, 0.2], FreqKind::Oscillatory),
            (vec![0.8, -0.3, 0.5, 0.1], FreqKind::Exponential),
        ] {
            let reduced = radial_fourier(&p, 4, &freq_vec, kind);
            let direct = radial_fourier_direct(&p, 4, &freq_vec, kind, 40);
            assert!(
                (reduced - direct).norm() < 1e-6 * (1.0 + direct.norm()),
                "{kind:?}: {reduced} vs {direct}"
            );
        }
    }

    #[test]
    fn radial_fourier_rotation_invariance() {
        use rand::prelude::*;
        let bump = RadialDensity::bump(1.0, vec![1.0]).unwrap();
        let p = SpatialBump::new(bump);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let w = vec![0.9, -0.4, 0.3, 0.6];
        let base = radial_fourier(&p, 4, &w, FreqKind::Oscillatory);
        for _ in 0..5 {
            let u = crate::grassmann::random_unitary_real(2, &mut rng);
            let rw = (&u * nalgebra::DVector::from_column_slice(&w))
                .as_slice()
                .to_vec();
            let rot = radial_fourier(&p, 4, &rw, FreqKind::Oscillatory);
            assert!((base - rot).norm() < 1e-12);
        }
    }

    #[test]
    fn density_pair_validation() {
        let bump = RadialDensity::bump(1.0, vec![1.0]).unwrap();
        let a: Arc<dyn Profile> = Arc::new(SpatialBump::new(bump.clone()));
        let b_mismatch: Arc<dyn Profile> = Arc::new(FnProfile {
            f: |_r: f64| 5.0,
            df: |_r: f64| 0.0,
            radius: 1.0,
        });
        assert!(DensityPair::new(a.clone(), b_mismatch).is_err());
        let b_ok: Arc<dyn Profile> = Arc::new(SpatialBump::new(bump));
        assert!(DensityPair::new(a, b_ok).is_ok());
    }

    #[test]
    fn psi_moments_match_direct_quadrature() {
        // The operator moments against a known radial profile must equal the
        // direct 2n-dimensional integral int S(x) psi(|x|^2) e^{<u,x>} dx for
        // a pure quadratic symbol S. Use S(x) = x_0^2 + 2 x_1 x_2 as a raw
        // quadratic form and psi a bump.
        let n = 2;
        let psi = RadialDensity::bump(0.81, vec![1.0]).unwrap();
        let spatial: Arc<dyn Profile> = Arc::new(SpatialBump::new(psi.clone()));
        let line = Arc::new(AbelOf::new(spatial, 2 * n - 1, 96));
        let u = vec![0.4, -0.2, 0.7, 0.1];
        let r = u.iter().map(|v| v * v).sum::<f64>().sqrt();

        // moments
        let radius = line.radius();
        let trace_part = 2.0
            * integrate_1d(96, 0.0, radius, |t| line.eval(t) * t * t * sinhc(t * r));
        let quad_part = 2.0
            * integrate_1d(96, 0.0, radius, |t| {
                line.eval(t) * t.powi(4) * cosh_sinhc_quot(t * r)
            });

        // symbol S: coefficient matrix C = diag-ish
        let s = |x: &[f64]| x[0] * x[0] + 2.0 * x[1] * x[2];
        let trace_s = 1.0; // C_00 = 1, C_11 = C_22 = 0 off-diagonal only
        let via_moments = trace_s * trace_part + s(&u) * quad_part;

        // direct 4-D integral
        let grid = crate::quadrature::TensorGrid::new(4, 40, 0.9);
        let mut point = vec![0.0; 4];
        let mut direct = 0.0;
        for idx in 0..grid.len() {
            let w = grid.node(idx, &mut point);
            let t = point.iter().map(|v| v * v).sum::<f64>();
            let pv = psi.eval(t);
            if pv == 0.0 {
                continue;
            }
            let dot: f64 = u.iter().zip(&point).map(|(a, b)| a * b).sum();
            direct += w * s(&point) * pv * dot.exp();
        }
        assert!(
            (via_moments - direct).abs() < 1e-4 * direct.abs().max(1e-3),
            "{via_moments} vs {direct}"
        );
    }
}

//! Evaluation of smooth valuations by differential-cycle quadrature over the
//! graph of df, Monge-Ampère integrals, exact subset-sum polarization, the
//! real-slice Goodey-Weil transform, and restriction to subspaces.
//!
//! A valuation here is a finite sum of terms density(|z|^2) * invariant form;
//! its value on a smooth convex f is the integral over the base of the
//! pullback of the form along z -> (z, df(z)), normalized so that the k = 0
//! form theta_0^n / n! integrates the density against Lebesgue measure (this
//! pins the orientation and makes the n = 1 Monge-Ampère value positive for
//! convex integrands).

use crate::convex::SmoothConvexFunction;
use crate::error::{Result, VconvError};
use crate::exterior::{c_nkq, theta0, theta_kq_in, MultiVector, PreparedForm, PullbackContext};
use crate::grassmann::Subspace;
use crate::mixed::times_i;
use crate::quadrature::TensorGrid;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Hard cap on |y| * spatial radius for exponential slices; beyond this the
/// double-precision quadrature loses all significance.
pub const EXP_GUARD: f64 = 30.0;

/// Minimum admissible per-axis quadrature order.
pub const MIN_ORDER: usize = 8;

/// Compactly supported smooth bump profile on [0, R):
/// poly(t) * exp(-1 / (1 - (t/R)^2)), identically zero for t >= R.
///
/// Valuation densities evaluate it at t = |z|^2, so the spatial support
/// radius is sqrt(R).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialDensity {
    radius: f64,
    poly: Vec<f64>,
}

impl RadialDensity {
    pub fn bump(radius: f64, poly: Vec<f64>) -> Result<Self> {
        if radius <= 0.0 || poly.is_empty() {
            return Err(VconvError::InvalidArgument(
                "bump needs positive radius and at least one coefficient".into(),
            ));
        }
        Ok(RadialDensity { radius, poly })
    }

    /// The constant-1 bump of the given radius.
    pub fn plateau(radius: f64) -> Self {
        RadialDensity {
            radius,
            poly: vec![1.0],
        }
    }

    /// Bump with the polynomial prefactor (1 - (t/R)^2)^power, which damps the
    /// flat edge of the exponential factor; tensor quadrature resolves these
    /// profiles one to two orders of magnitude better at moderate orders.
    pub fn damped(radius: f64, power: usize) -> Result<Self> {
        let mut poly = vec![0.0; 2 * power + 1];
        for i in 0..=power {
            let mut c = 1.0;
            for j in 0..i {
                c = c * (power - j) as f64 / (j + 1) as f64;
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            poly[2 * i] = sign * c / radius.powi(2 * i as i32);
        }
        RadialDensity::bump(radius, poly)
    }

    /// Multiply the polynomial prefactor by another polynomial in t.
    pub fn times_poly(&self, other: &[f64]) -> Result<Self> {
        if other.is_empty() {
            return Err(VconvError::InvalidArgument(
                "polynomial factor needs at least one coefficient".into(),
            ));
        }
        let mut poly = vec![0.0; self.poly.len() + other.len() - 1];
        for (i, a) in self.poly.iter().enumerate() {
            for (j, b) in other.iter().enumerate() {
                poly[i + j] += a * b;
            }
        }
        RadialDensity::bump(self.radius, poly)
    }

    /// Support radius in the t variable.
    pub fn radius_t(&self) -> f64 {
        self.radius
    }

    pub fn poly_coefficients(&self) -> &[f64] {
        &self.poly
    }

    /// Support radius of z -> eval(|z|^2).
    pub fn spatial_radius(&self) -> f64 {
        self.radius.sqrt()
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 || t >= self.radius {
            return 0.0;
        }
        let u = t / self.radius;
        let w = -1.0 / (1.0 - u * u);
        let mut p = 0.0;
        for &c in self.poly.iter().rev() {
            p = p * t + c;
        }
        p * w.exp()
    }

    pub fn deriv(&self, t: f64) -> f64 {
        if t < 0.0 || t >= self.radius {
            return 0.0;
        }
        let u = t / self.radius;
        let denom = 1.0 - u * u;
        let w = -1.0 / denom;
        let wp = -2.0 * t / (self.radius * self.radius * denom * denom);
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.poly.iter().rev() {
            dp = dp * t + p;
            p = p * t + c;
        }
        (dp + p * wp) * w.exp()
    }
}

/// Which invariant form a raw term integrates against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RawFormKind {
    /// theta^n_{k,q}
    Theta,
    /// beta_1 ^ beta_2 ^ theta^{n-1}_{k-2,q-1}
    BetaBeta,
    /// beta_1 ^ gamma_2 ^ theta^{n-1}_{k-1,q}
    BetaGamma,
}

/// One term of a smooth valuation.
#[derive(Clone, Debug)]
pub enum ValuationTerm {
    /// density(|z|^2) Theta^n_{k,q} (the constant-form family)
    Theta { q: usize, density: RadialDensity },
    /// density(|z|^2) Upsilon^n_{k,q} (the beta/gamma mixed family)
    Upsilon { q: usize, density: RadialDensity },
    /// density(|z|^2) * constant * (raw invariant form)
    Raw {
        q: usize,
        kind: RawFormKind,
        density: RadialDensity,
        constant: f64,
    },
}

/// A smooth k-homogeneous valuation on Conv(C^n, R), encoded by terms.
#[derive(Clone, Debug)]
pub struct SmoothValuationSpec {
    n: usize,
    k: usize,
    terms: Vec<ValuationTerm>,
}

impl SmoothValuationSpec {
    pub fn new(n: usize, k: usize, terms: Vec<ValuationTerm>) -> Result<Self> {
        if k > 2 * n {
            return Err(VconvError::IndexOutOfRange(format!(
                "homogeneity degree k = {k} exceeds 2n = {}",
                2 * n
            )));
        }
        for t in &terms {
            let (q, lo, hi) = match t {
                ValuationTerm::Theta { q, .. } => (*q, k.saturating_sub(n), k / 2),
                ValuationTerm::Upsilon { q, .. } => {
                    (*q, k.saturating_sub(n).max(1), (k.max(1) - 1) / 2)
                }
                ValuationTerm::Raw { q, kind, .. } => match kind {
                    RawFormKind::Theta => (*q, k.saturating_sub(n), k / 2),
                    RawFormKind::BetaBeta => (*q, k.saturating_sub(n).max(1), k / 2),
                    RawFormKind::BetaGamma => (*q, k.saturating_sub(n), (k.max(1) - 1) / 2),
                },
            };
            if q < lo || q > hi {
                return Err(VconvError::IndexOutOfRange(format!(
                    "term index q = {q} outside [{lo}, {hi}] for n = {n}, k = {k}"
                )));
            }
        }
        Ok(SmoothValuationSpec { n, k, terms })
    }

    /// The valuation D(f)[phi(|z|^2) Theta^n_{k,q}].
    pub fn theta_family(n: usize, k: usize, q: usize, phi: RadialDensity) -> Result<Self> {
        Self::new(n, k, vec![ValuationTerm::Theta { q, density: phi }])
    }

    /// The valuation D(f)[psi(|z|^2) Upsilon^n_{k,q}].
    pub fn upsilon_family(n: usize, k: usize, q: usize, psi: RadialDensity) -> Result<Self> {
        Self::new(n, k, vec![ValuationTerm::Upsilon { q, density: psi }])
    }

    /// The mu^beta family: c_{n,k,q} D(f)[phi(|z|^2) beta_1^beta_2^theta^{n-1}_{k-2,q-1}].
    pub fn beta_family(n: usize, k: usize, q: usize, phi: RadialDensity) -> Result<Self> {
        let c = c_nkq(n, k, q);
        Self::new(
            n,
            k,
            vec![ValuationTerm::Raw {
                q,
                kind: RawFormKind::BetaBeta,
                density: phi,
                constant: c,
            }],
        )
    }

    /// The mu^gamma family: c_{n,k,q} D(f)[phi(|z|^2) beta_1^gamma_2^theta^{n-1}_{k-1,q}].
    pub fn gamma_family(n: usize, k: usize, q: usize, phi: RadialDensity) -> Result<Self> {
        let c = c_nkq(n, k, q);
        Self::new(
            n,
            k,
            vec![ValuationTerm::Raw {
                q,
                kind: RawFormKind::BetaGamma,
                density: phi,
                constant: c,
            }],
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[ValuationTerm] {
        &self.terms
    }

    /// Spatial support radius: the largest sqrt(R_t) over the term densities.
    pub fn spatial_radius(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| match t {
                ValuationTerm::Theta { density, .. }
                | ValuationTerm::Upsilon { density, .. }
                | ValuationTerm::Raw { density, .. } => density.spatial_radius(),
            })
            .fold(0.0, f64::max)
    }

    fn prepare(&self) -> Vec<PreparedTerm> {
        let n = self.n as i64;
        let k = self.k as i64;
        self.terms
            .iter()
            .map(|t| match t {
                ValuationTerm::Theta { q, density } => PreparedTerm {
                    density: density.clone(),
                    scale: c_nkq(self.n, self.k, *q),
                    kind: PreparedKind::Constant(prepare(
                        self.n,
                        &theta_kq_in(self.n, n, k, *q as i64),
                    )),
                },
                ValuationTerm::Upsilon { q, density } => {
                    let q = *q as i64;
                    PreparedTerm {
                        density: density.clone(),
                        scale: c_nkq(self.n, self.k, q as usize),
                        kind: PreparedKind::Upsilon {
                            bb: prepare(self.n, &theta_kq_in(self.n, n - 1, k - 2, q - 1)),
                            bg: prepare(self.n, &theta_kq_in(self.n, n - 1, k - 1, q)),
                        },
                    }
                }
                ValuationTerm::Raw {
                    q,
                    kind,
                    density,
                    constant,
                } => {
                    let q = *q as i64;
                    let kind = match kind {
                        RawFormKind::Theta => PreparedKind::Constant(prepare(
                            self.n,
                            &theta_kq_in(self.n, n, k, q),
                        )),
                        RawFormKind::BetaBeta => PreparedKind::BetaBeta(prepare(
                            self.n,
                            &theta_kq_in(self.n, n - 1, k - 2, q - 1),
                        )),
                        RawFormKind::BetaGamma => PreparedKind::BetaGamma(prepare(
                            self.n,
                            &theta_kq_in(self.n, n - 1, k - 1, q),
                        )),
                    };
                    PreparedTerm {
                        density: density.clone(),
                        scale: *constant,
                        kind,
                    }
                }
            })
            .collect()
    }

    /// D(f) paired with the valuation's form, by tensor Gauss-Legendre
    /// quadrature of the pulled-back density over the support cube.
    pub fn evaluate(&self, f: &SmoothConvexFunction, order: usize) -> Result<f64> {
        if order < MIN_ORDER {
            return Err(VconvError::InvalidConfig(format!(
                "quadrature order {order} is below the minimum {MIN_ORDER}"
            )));
        }
        if f.dim() != 2 * self.n {
            return Err(VconvError::DimensionMismatch {
                expected: 2 * self.n,
                got: f.dim(),
            });
        }
        let prepared = self.prepare();
        let r = self.spatial_radius();
        let r_t_max = r * r;
        let grid = TensorGrid::new(2 * self.n, order, r);
        let vol = volume_normalization(self.n);

        let chunk = 4096usize;
        let nchunks = grid.len().div_ceil(chunk);
        // fixed-size chunks with an ordered reduction keep the result
        // bit-identical for a given configuration, independent of threads
        let partials: Vec<f64> = (0..nchunks)
            .into_par_iter()
            .map(|ci| {
                let mut ctx = PullbackContext::new(self.n);
                let mut point = vec![0.0; 2 * self.n];
                let mut sum = 0.0;
                let lo = ci * chunk;
                let hi = ((ci + 1) * chunk).min(grid.len());
                for idx in lo..hi {
                    let weight = grid.node(idx, &mut point);
                    let t = point.iter().map(|v| v * v).sum::<f64>();
                    if t >= r_t_max {
                        continue;
                    }
                    let mut densities_nonzero = false;
                    for pt in &prepared {
                        if pt.density.eval(t) != 0.0 {
                            densities_nonzero = true;
                            break;
                        }
                    }
                    if !densities_nonzero {
                        continue;
                    }
                    let h = f.hess(&point);
                    ctx.set_hessian(&h);
                    let mut node_val = 0.0;
                    for pt in &prepared {
                        let d = pt.density.eval(t);
                        if d == 0.0 {
                            continue;
                        }
                        let geom = match &pt.kind {
                            PreparedKind::Constant(form) => ctx.pull_top(form),
                            PreparedKind::BetaBeta(rest) => {
                                let b1 = h_times(&h, &point);
                                let b2 = h_times(&h, &times_i(&point));
                                ctx.pull_top_with_prefix(&b1, &b2, rest)
                            }
                            PreparedKind::BetaGamma(rest) => {
                                let b1 = h_times(&h, &point);
                                let g2 = times_i(&point);
                                ctx.pull_top_with_prefix(&b1, &g2, rest)
                            }
                            PreparedKind::Upsilon { bb, bg } => {
                                let b1 = h_times(&h, &point);
                                let b2 = h_times(&h, &times_i(&point));
                                let g2 = times_i(&point);
                                ctx.pull_top_with_prefix(&b1, &b2, bb)
                                    - 2.0 * ctx.pull_top_with_prefix(&b1, &g2, bg)
                            }
                        };
                        node_val += d * pt.scale * geom;
                    }
                    sum += weight * node_val;
                }
                sum
            })
            .collect();
        Ok(partials.iter().sum::<f64>() / vol)
    }
}

struct PreparedTerm {
    density: RadialDensity,
    scale: f64,
    kind: PreparedKind,
}

enum PreparedKind {
    Constant(PreparedForm),
    BetaBeta(PreparedForm),
    BetaGamma(PreparedForm),
    Upsilon { bb: PreparedForm, bg: PreparedForm },
}

fn prepare(n: usize, form: &MultiVector) -> PreparedForm {
    let _ = n;
    PreparedForm::new(form)
}

/// Coefficient of the canonical top base monomial in theta_0^n / n!; dividing
/// by it normalizes pullback coefficients to Lebesgue measure.
pub fn volume_normalization(n: usize) -> f64 {
    let top = theta0(n).wedge_power(n);
    let full: u32 = (1u32 << (2 * n)) - 1;
    top.coefficient(full) / crate::exterior::factorial(n as i64)
}

fn h_times(h: &nalgebra::DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    let d = v.len();
    let mut out = vec![0.0; d];
    for r in 0..d {
        let mut acc = 0.0;
        for c in 0..d {
            acc += h[(r, c)] * v[c];
        }
        out[r] = acc;
    }
    out
}

/// Anything that can be polarized: a k-homogeneous functional on smooth
/// convex functions.
pub trait Valuation {
    fn degree(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    /// Spatial radius of the region the functional actually reads.
    fn support_radius(&self) -> f64;
    fn apply(&self, f: &SmoothConvexFunction) -> Result<f64>;
}

/// A spec bound to a quadrature order, as a polarizable valuation.
pub struct QuadratureValuation<'a> {
    pub spec: &'a SmoothValuationSpec,
    pub order: usize,
}

impl Valuation for QuadratureValuation<'_> {
    fn degree(&self) -> usize {
        self.spec.degree()
    }

    fn ambient_dim(&self) -> usize {
        2 * self.spec.n()
    }

    fn support_radius(&self) -> f64 {
        self.spec.spatial_radius()
    }

    fn apply(&self, f: &SmoothConvexFunction) -> Result<f64> {
        self.spec.evaluate(f, self.order)
    }
}

/// Monge-Ampère integral of phi against det(D^2 f) over the cube of the given
/// radius (which must contain the support of phi).
pub fn monge_ampere(
    phi: &(dyn Fn(&[f64]) -> f64 + Sync),
    radius: f64,
    f: &SmoothConvexFunction,
    order: usize,
) -> Result<f64> {
    let d = f.dim();
    let grid = TensorGrid::new(d, order, radius);
    let chunk = 4096usize;
    let nchunks = grid.len().div_ceil(chunk);
    let partials: Vec<f64> = (0..nchunks)
        .into_par_iter()
        .map(|ci| {
            let mut point = vec![0.0; d];
            let mut sum = 0.0;
            for idx in ci * chunk..((ci + 1) * chunk).min(grid.len()) {
                let w = grid.node(idx, &mut point);
                let pv = phi(&point);
                if pv == 0.0 {
                    continue;
                }
                let det = f.hess(&point).lu().determinant();
                sum += w * pv * det;
            }
            sum
        })
        .collect();
    Ok(partials.iter().sum())
}

/// Exact polarization of a k-homogeneous valuation by the subset-sum formula
/// (1/k!) sum_{S subset {1..k}} (-1)^{k-|S|} v(sum_{i in S} f_i);
/// the empty subset contributes v(0) with the zero function.
pub fn polarize(v: &dyn Valuation, fs: &[SmoothConvexFunction]) -> Result<f64> {
    let k = v.degree();
    if fs.len() != k {
        return Err(VconvError::InvalidArgument(format!(
            "polarization of a degree-{k} valuation needs exactly {k} arguments, got {}",
            fs.len()
        )));
    }
    if k == 0 {
        return v.apply(&SmoothConvexFunction::zero(v.ambient_dim()));
    }
    for f in fs {
        if f.dim() != v.ambient_dim() {
            return Err(VconvError::DimensionMismatch {
                expected: v.ambient_dim(),
                got: f.dim(),
            });
        }
    }
    let mut total = 0.0;
    for mask in 0u32..(1 << k) {
        let members: Vec<SmoothConvexFunction> = (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| fs[i].clone())
            .collect();
        let f = if members.is_empty() {
            SmoothConvexFunction::zero(v.ambient_dim())
        } else {
            SmoothConvexFunction::Sum(members)
        };
        let sign = if (k - mask.count_ones() as usize).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        total += sign * v.apply(&f)?;
    }
    Ok(total / crate::exterior::factorial(k as i64))
}

/// Real slice of the Goodey-Weil transform: the polarization evaluated on the
/// exponentials exp<y_i, .>. Guards |y_i| * R <= 30 to keep the quadrature
/// meaningful in double precision.
pub fn gw_slice(v: &dyn Valuation, ys: &[Vec<f64>]) -> Result<f64> {
    let r = v.support_radius();
    for y in ys {
        let norm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm * r > EXP_GUARD {
            return Err(VconvError::OverflowGuard(norm * r, EXP_GUARD));
        }
        if y.len() != v.ambient_dim() {
            return Err(VconvError::DimensionMismatch {
                expected: v.ambient_dim(),
                got: y.len(),
            });
        }
    }
    let fs: Vec<SmoothConvexFunction> = ys
        .iter()
        .map(|y| SmoothConvexFunction::exp_linear(y))
        .collect();
    polarize(v, &fs)
}

/// The pushforward of a valuation along the orthogonal projection onto a
/// subspace: functions on E are pulled back to C^n and fed to the spec.
pub struct RestrictedValuation<'a> {
    spec: &'a SmoothValuationSpec,
    subspace: Subspace,
    order: usize,
}

impl<'a> RestrictedValuation<'a> {
    pub fn new(spec: &'a SmoothValuationSpec, subspace: Subspace, order: usize) -> Self {
        RestrictedValuation {
            spec,
            subspace,
            order,
        }
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }
}

impl Valuation for RestrictedValuation<'_> {
    fn degree(&self) -> usize {
        self.spec.degree()
    }

    fn ambient_dim(&self) -> usize {
        self.subspace.k()
    }

    fn support_radius(&self) -> f64 {
        self.spec.spatial_radius()
    }

    fn apply(&self, f_on_e: &SmoothConvexFunction) -> Result<f64> {
        let lifted = SmoothConvexFunction::pullback(f_on_e.clone(), &self.subspace)?;
        self.spec.evaluate(&lifted, self.order)
    }
}

//! Restrictions to the extremal subspaces: the valuation restricted to
//! E_{k,q} is a density against the Monge-Ampère measure, and that density
//! comes from iterated Abel transforms of the defining profiles.

use nalgebra::{DMatrix, DVector};
use vconv::convex::SmoothConvexFunction;
use vconv::grassmann::extremal_subspace;
use vconv::transforms::densities_from_spec;
use vconv::valuation::{
    monge_ampere, RadialDensity, RestrictedValuation, SmoothValuationSpec, Valuation,
    ValuationTerm,
};

fn main() -> vconv::Result<()> {
    let n = 2;
    let k = 3;
    let q = 1;
    let phi = RadialDensity::damped(1.0, 4)?;
    let psi = phi.times_poly(&[0.6, 0.8])?;
    let spec = SmoothValuationSpec::new(
        n,
        k,
        vec![
            ValuationTerm::Theta {
                q,
                density: phi.clone(),
            },
            ValuationTerm::Upsilon {
                q,
                density: psi.clone(),
            },
        ],
    )?;

    let pair = densities_from_spec(&spec, q, 96)?;
    println!("restriction densities on E_{{{k},{q}}} (radius {:.3}):", pair.radius());
    for i in 0..=6 {
        let s = pair.radius() * i as f64 / 6.0;
        println!("  s = {s:.3}: a = {:+.6e}, b = {:+.6e}", pair.a(s), pair.b(s));
    }
    println!("a(0) - b(0) = {:+.3e} (they agree at the origin)", pair.a(0.0) - pair.b(0.0));

    // two routes to the restricted value on a test function over E_{k,q}
    let e = extremal_subspace(n, k, q)?;
    let f = SmoothConvexFunction::Sum(vec![
        SmoothConvexFunction::quadratic(DMatrix::identity(k, k) * 0.8, DVector::zeros(k), 0.0)?,
        SmoothConvexFunction::exp_linear(&[0.5, -0.3, 0.2]),
    ]);
    let restricted = RestrictedValuation::new(&spec, e, 24);
    let full = restricted.apply(&f)?;
    let density_fn = move |x: &[f64]| -> f64 {
        let zsq: f64 = x[..2 * q].iter().map(|v| v * v).sum();
        let xsq: f64 = x[2 * q..].iter().map(|v| v * v).sum();
        let r2 = zsq + xsq;
        if r2 < 1e-24 {
            pair.a(0.0)
        } else {
            (zsq * pair.a(r2.sqrt()) + xsq * pair.b(r2.sqrt())) / r2
        }
    };
    let low = monge_ampere(&density_fn, 1.0, &f, 48)?;
    println!("full-dimensional quadrature: {full:.10}");
    println!("density against det D^2 f:   {low:.10}");
    println!("relative gap: {:.3e}", ((full - low) / low).abs());
    Ok(())
}

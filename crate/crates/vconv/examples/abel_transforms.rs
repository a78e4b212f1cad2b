//! Abel transforms: forward iterates, the singular inverse, round trips, and
//! the Gaussian identity A(exp(-r^2)) = sqrt(pi) exp(-t^2).

use std::sync::Arc;
use vconv::transforms::{
    abel, abel_inverse_with_order, abel_m, AbelOf, FnProfile, Profile, SpatialBump,
};
use vconv::valuation::RadialDensity;

fn main() -> vconv::Result<()> {
    // truncated parabola: closed-form transform (4/3)(1 - t^2)^{3/2}
    let parabola = FnProfile {
        f: |r: f64| (1.0 - r * r).max(0.0),
        df: |r: f64| if r < 1.0 { -2.0 * r } else { 0.0 },
        radius: 1.0,
    };
    println!("A((1-r^2)_+) vs closed form:");
    for t in [0.0, 0.3, 0.6, 0.9] {
        let got = abel(&parabola, t);
        let want = 4.0 / 3.0 * (1.0 - t * t).powf(1.5);
        println!("  t = {t:.1}: {got:.10} (closed {want:.10})");
    }

    // round trip on a smooth bump
    let bump: Arc<dyn Profile> = Arc::new(SpatialBump::new(RadialDensity::damped(1.0, 2)?));
    let forward = AbelOf::new(bump.clone(), 1, 128);
    let mut sup: f64 = 0.0;
    for i in 0..=50 {
        let t = i as f64 / 50.0;
        sup = sup.max((abel_inverse_with_order(&forward, t, 128) - bump.eval(t)).abs());
    }
    println!("round-trip sup error on a smooth bump: {sup:.3e}");

    // Gaussian identity (compact truncation far in the tail)
    let gauss = FnProfile {
        f: |r: f64| (-r * r).exp(),
        df: |r: f64| -2.0 * r * (-r * r).exp(),
        radius: 12.0,
    };
    for t in [0.0, 1.0, 2.0] {
        let got = abel(&gauss, t);
        let want = std::f64::consts::PI.sqrt() * (-t * t).exp();
        println!("A(exp(-r^2))({t}) = {got:.12} (analytic {want:.12})");
    }

    // iterated transforms are one radial integral each
    for m in 1..=4 {
        println!("A^{m}(bump)(0.2) = {:.10}", abel_m(bump.as_ref(), m, 0.2));
    }
    Ok(())
}

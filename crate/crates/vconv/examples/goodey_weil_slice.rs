//! The real slice of the Goodey-Weil transform: subset-sum polarization on
//! exponentials, compared with the closed-form side P_{k,q}(y)/k! times the
//! radial Laplace transform of the density.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use vconv::exterior::factorial;
use vconv::mixed::VectorTuple;
use vconv::polynomials::p_kq;
use vconv::quadrature::integrate_1d;
use vconv::transforms::{AbelOf, Profile, SpatialBump};
use vconv::valuation::{gw_slice, QuadratureValuation, RadialDensity, SmoothValuationSpec};

fn main() -> vconv::Result<()> {
    let n = 2;
    let k = 2;
    let q = 1;
    let density = RadialDensity::damped(1.0, 4)?;
    let spec = SmoothValuationSpec::theta_family(n, k, q, density.clone())?;
    let v = QuadratureValuation {
        spec: &spec,
        order: 24,
    };
    let spatial: Arc<dyn Profile> = Arc::new(SpatialBump::new(density));
    let line = AbelOf::new(spatial, 2 * n - 1, 96);

    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    println!("polarization on exponentials vs closed form (k = {k}, q = {q}):");
    for trial in 0..5 {
        let ys: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..2 * n).map(|_| rng.gen_range(-1.5..1.5)).collect())
            .collect();
        let slice = gw_slice(&v, &ys)?;
        let w = VectorTuple::new(n, ys.clone())?;
        let sum: Vec<f64> = (0..2 * n)
            .map(|i| ys.iter().map(|y| y[i]).sum())
            .collect();
        let r = sum.iter().map(|a| a * a).sum::<f64>().sqrt();
        let laplace = 2.0 * integrate_1d(96, 0.0, line.radius(), |t| line.eval(t) * (t * r).cosh());
        let closed = p_kq(&w, q as i64)? * laplace / factorial(k as i64);
        println!(
            "  tuple {trial}: slice {slice:+.8e}, closed {closed:+.8e}, rel {:.2e}",
            ((slice - closed) / closed).abs()
        );
    }

    // the slice at y = 0 vanishes: constants are affine
    let zeros = vec![vec![0.0; 2 * n]; k];
    println!("slice at y = 0: {:+.3e}", gw_slice(&v, &zeros)?);
    Ok(())
}

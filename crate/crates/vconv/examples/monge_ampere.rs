//! Monge-Ampère integrals and their differential-cycle counterpart: for
//! n = 1 the valuation with the fiber volume form is exactly the integral of
//! the density against det(D^2 f).

use nalgebra::{DMatrix, DVector};
use vconv::convex::SmoothConvexFunction;
use vconv::valuation::{monge_ampere, RadialDensity, SmoothValuationSpec};

fn main() -> vconv::Result<()> {
    let density = RadialDensity::damped(1.0, 2)?;
    let phi = {
        let d = density.clone();
        move |x: &[f64]| d.eval(x.iter().map(|v| v * v).sum())
    };

    // constant Hessians scale by the determinant
    let id = SmoothConvexFunction::quadratic(DMatrix::identity(2, 2), DVector::zeros(2), 0.0)?;
    let base = monge_ampere(&phi, 1.0, &id, 48)?;
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.4, 0.4, 1.5]);
    let det = a.clone().lu().determinant();
    let fa = SmoothConvexFunction::quadratic(a, DVector::zeros(2), 0.0)?;
    let scaled = monge_ampere(&phi, 1.0, &fa, 48)?;
    println!("int phi dMA(|x|^2/2)      = {base:.12}");
    println!("int phi dMA(x^T A x / 2)  = {scaled:.12}");
    println!("ratio vs det(A) = {det:.6}: {:.3e}", (scaled / base - det).abs());

    // n = 1: the fiber volume form evaluates to the same integral
    let spec = SmoothValuationSpec::theta_family(1, 2, 1, density.clone())?;
    let f = SmoothConvexFunction::Sum(vec![
        SmoothConvexFunction::quadratic(DMatrix::identity(2, 2) * 0.5, DVector::zeros(2), 0.0)?,
        SmoothConvexFunction::exp_linear(&[0.4, -0.2]),
    ]);
    let via_cycle = spec.evaluate(&f, 32)?;
    let via_ma = monge_ampere(&phi, 1.0, &f, 32)?;
    println!("differential cycle: {via_cycle:.12}");
    println!("direct quadrature:  {via_ma:.12}");
    println!("relative gap: {:.3e}", ((via_cycle - via_ma) / via_ma).abs());
    Ok(())
}

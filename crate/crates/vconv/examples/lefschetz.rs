//! Lefschetz structure of the invariant algebra: primitive decomposition,
//! the hard-Lefschetz bijection at desk scale, and mod-omega_s residuals.

use vconv::exterior::{
    basis_masks, lefschetz_decompose, lefschetz_matrix, lefschetz_reassemble, omega_s,
    LefschetzOps, MultiVector,
};

fn main() -> vconv::Result<()> {
    let n = 2;

    // omega_s itself decomposes as L applied to the scalar 1
    let parts = lefschetz_decompose(&omega_s(n))?;
    println!(
        "omega_s: primitive part norm {:.3e}, scalar component {:.3}",
        parts[0].norm(),
        parts[1].coefficient(0)
    );
    let back = lefschetz_reassemble(&parts);
    println!(
        "reassembly residual: {:.3e}",
        back.sub(&omega_s(n))?.norm()
    );

    // L^{N-k} : degree k -> degree 4n-k has full rank (N = 2n)
    for k in 0..=2 * n {
        let dim = basis_masks(n, k).len();
        let mut m = nalgebra::DMatrix::<f64>::identity(dim, dim);
        for step in 0..(2 * n - k) {
            m = lefschetz_matrix(n, k + 2 * step) * m;
        }
        let rank = m.clone().svd(false, false).rank(1e-8);
        println!("L^{} on degree {k}: rank {rank} of {}", 2 * n - k, m.ncols());
    }

    // mod-omega_s residuals separate multiples from non-multiples
    let ops = LefschetzOps::new(n);
    let multiple = omega_s(n).wedge(&MultiVector::generator(n, 3))?;
    let mut plain = MultiVector::generator(n, 0)
        .wedge(&MultiVector::generator(n, 2))?;
    plain = plain.scale(2.0);
    println!(
        "residual of omega_s ^ dy2: {:.3e}; residual of 2 dx1 ^ dy1: {:.3e}",
        ops.mod_omega_s_residual(&multiple),
        ops.mod_omega_s_residual(&plain)
    );
    Ok(())
}

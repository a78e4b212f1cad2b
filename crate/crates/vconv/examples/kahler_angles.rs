//! Multiple Kähler angles of real subspaces of C^n, Tasaki normal forms, and
//! the extremal subspaces E_{k,q}.

use vconv::grassmann::{
    extremal_subspace, kahler_angles, random_subspace, tasaki_basis, tasaki_normal_form_residual,
};
use vconv::mixed::gram_pack;

fn main() -> vconv::Result<()> {
    // the extremal subspaces sit at the vertices of the angle simplex
    for (n, k, q) in [(2, 2, 1), (2, 2, 0), (3, 4, 1), (3, 3, 0)] {
        let e = extremal_subspace(n, k, q)?;
        let angles = kahler_angles(&e)?;
        println!("E_{{{k},{q}}} in C^{n}: angles {:?}", angles.angles());
    }

    // a random 3-plane in C^3 and its Tasaki basis
    let e = random_subspace(3, 3, 12345)?;
    let angles = kahler_angles(&e)?;
    println!("random 3-plane in C^3: angles {:?}", angles.angles());
    let t = tasaki_basis(&e)?;
    let gp = gram_pack(&t, &[0.0; 6]);
    println!("Tasaki skew Gram matrix:");
    for r in 0..3 {
        println!(
            "  [{:+.6} {:+.6} {:+.6}]",
            gp.i_w[(r, 0)],
            gp.i_w[(r, 1)],
            gp.i_w[(r, 2)]
        );
    }
    println!(
        "normal-form residual: {:.3e}",
        tasaki_normal_form_residual(&t)?
    );

    // out-of-range extremal indices are rejected
    match extremal_subspace(2, 3, 0) {
        Err(err) => println!("E_{{3,0}} in C^2 rejected: {err}"),
        Ok(_) => println!("unexpected success"),
    }
    Ok(())
}

//! The invariant exterior algebra at a point of T*C^n: generators, wedge
//! powers, and the contraction table of the radial vector fields.

use vconv::exterior::{
    contract, invariant_form, theta_kq, FormName, MultiVector, Point, TangentVector,
};

fn main() -> vconv::Result<()> {
    let n = 2;
    let p = Point::e1(n);

    println!("gamma_1 at z = e_1: {:?}", invariant_form(FormName::Gamma1, &p));
    println!("omega_2 at z = e_1: {:?}", invariant_form(FormName::Omega2, &p));

    // theta_0^n recovers n! times the base volume block
    let top = invariant_form(FormName::Theta0, &p).wedge_power(n);
    println!("theta_0^{n} has {} term(s): {:?}", top.num_terms(), top);

    // the six-entry contraction table, printed at a generic point
    let q = Point::new(n, vec![0.4, -0.2, 0.9, 0.3], vec![0.0; 4]);
    let xg = TangentVector::x_gamma1(n, &q.z);
    let xb = TangentVector::x_beta1(n, &q.z);
    let names = [FormName::Theta0, FormName::Theta1, FormName::Theta2];
    for name in names {
        let form = invariant_form(name, &q);
        let via_gamma = contract(&xg, &form)?;
        let via_beta = contract(&xb, &form)?;
        println!(
            "{name:?}: |i_X_gamma1| = {:.3e}, |i_X_beta1| = {:.3e}",
            via_gamma.norm(),
            via_beta.norm()
        );
    }

    // the theta^n_{k,q} family, including the out-of-range convention
    for (k, q) in [(2i64, 0i64), (2, 1), (3, 1), (4, 2), (2, 2)] {
        let t = theta_kq(n, k, q);
        println!(
            "theta^{n}_{{{k},{q}}}: {} terms{}",
            t.num_terms(),
            if t.is_zero() { " (out of range -> 0)" } else { "" }
        );
    }

    // graded anticommutativity on 1-forms
    let a = MultiVector::generator(n, 0);
    let b = MultiVector::generator(n, 5);
    let ab = a.wedge(&b)?;
    let ba = b.wedge(&a)?;
    println!(
        "dx1 ^ dy2 + dy2 ^ dx1 = {:?} (graded anticommutativity)",
        ab.add(&ba)?
    );
    Ok(())
}

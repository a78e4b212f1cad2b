//! The invariant polynomials P_{k,q} and the Klain functions of the Hermitian
//! intrinsic volumes: the delta table on extremal subspaces and the
//! factorization through the angle cosines.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use vconv::grassmann::{extremal_subspace, random_subspace};
use vconv::mixed::{gram_pack, VectorTuple};
use vconv::polynomials::{klain_mu_kq, p_kq};

fn main() -> vconv::Result<()> {
    let n = 3usize;
    let k = 4usize;
    let mut rng = ChaCha8Rng::seed_from_u64(77);

    println!("Klain delta table for k = {k} in C^{n} (rows p, columns q):");
    for p in k.saturating_sub(n)..=k / 2 {
        let e_kp = extremal_subspace(n, k, p)?;
        let coeffs: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let w = VectorTuple::new(n, coeffs.iter().map(|c| e_kp.embed(c)).collect())?;
        let det = gram_pack(&w, &[0.0; 6]).r_w.clone().lu().determinant();
        let mut row = format!("  p = {p}:");
        for q in k.saturating_sub(n)..=k / 2 {
            row.push_str(&format!(" {:+.12}", p_kq(&w, q as i64)? / det));
        }
        println!("{row}");
    }

    // on a generic subspace the quotient is the Klain function of mu_{k,q}
    let e = random_subspace(n, k, 99)?;
    let coeffs: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let w = VectorTuple::new(n, coeffs.iter().map(|c| e.embed(c)).collect())?;
    let det = gram_pack(&w, &[0.0; 6]).r_w.clone().lu().determinant();
    println!("random 4-plane in C^3:");
    for q in 0..=(k as i64 / 2) {
        println!(
            "  q = {q}: P/det = {:+.9}, Klain = {:+.9}",
            p_kq(&w, q)? / det,
            klain_mu_kq(&e, q)?
        );
    }
    Ok(())
}

//! Named verification suites. Each suite exercises one identity cluster at
//! the configured sizes, producing a sorted, machine-readable residual
//! report; determinism is seeded through the configuration.

use crate::convex::SmoothConvexFunction;
use crate::error::{Result, VconvError};
use crate::exterior::{
    contract, invariant_form, lefschetz_power, theta_kq, theta_kq_in, FormName, LefschetzOps,
    MultiVector, Point, TangentVector,
};
use crate::grassmann::{
    extremal_subspace, gaussian, kahler_angles, random_subspace_with, random_unitary_real,
    tasaki_basis, tasaki_normal_form_residual, Subspace,
};
use crate::mixed::{det_mixed, det_mixed_leibniz_oracle, gram_pack, VectorTuple};
use crate::polynomials::{
    elementary_symmetric, klain_mu_kq, p_kq, symbol_beta, symbol_blocks_via_det, symbol_gamma,
    tasaki_closed_forms,
};
use crate::quadrature::integrate_1d;
use crate::report::{CaseRecord, ExperimentConfig, ResidualReport};
use crate::transforms::{
    abel_inverse_with_order, abel_m_with_order, densities_from_spec, AbelOf, FnProfile, Profile,
    ReconstructionData, SpatialBump,
};
use crate::valuation::{
    gw_slice, monge_ampere, QuadratureValuation, RadialDensity, RestrictedValuation,
    SmoothValuationSpec, Valuation,
};
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

/// Suite names with one-line descriptions, in canonical order.
pub fn list_suites() -> &'static [(&'static str, &'static str)] {
    &[
        (
            "forms3",
            "contraction table, the primitive-form identity, and the mod-omega_s recursion for theta^n_{k,q}",
        ),
        (
            "detk",
            "mixed discriminant vs brute-force symbolic expansion; Tasaki determinant factorization",
        ),
        (
            "kahler",
            "Kähler angle invariance, extremal angle patterns, Tasaki normal forms",
        ),
        (
            "prop45",
            "P_{k,q} factorization through the Klain function; delta values on extremal subspaces",
        ),
        (
            "cor49",
            "beta/gamma symbols on extremal tuples: closed forms and cross-q vanishing",
        ),
        (
            "lemma48",
            "det_mixed symbol blocks vs Tasaki closed-form sums",
        ),
        (
            "prop410",
            "real-slice transform identities for the three valuation families (quadrature vs closed form)",
        ),
        (
            "cor411",
            "restriction of mu_{k,q,phi} to extremal subspaces vanishes off its own q",
        ),
        (
            "cor416",
            "restriction densities: Abel forward formulas vs two quadrature routes",
        ),
        ("abel", "Abel round trips, Gaussian identity, iterate composition"),
        (
            "thm418",
            "end-to-end reconstruction of the Goodey-Weil transform from extremal densities vs direct polarization",
        ),
        (
            "theorem1",
            "separation: a single-q valuation vanishes on foreign extremal tuples and is recovered from its own",
        ),
    ]
}

/// Run one named suite with the given configuration.
pub fn run_suite(name: &str, config: &ExperimentConfig) -> Result<ResidualReport> {
    config.validate()?;
    let start = Instant::now();
    let cases = match name {
        "forms3" => suite_forms3(config)?,
        "detk" => suite_detk(config)?,
        "kahler" => suite_kahler(config)?,
        "prop45" => suite_prop45(config)?,
        "cor49" => suite_cor49(config)?,
        "lemma48" => suite_lemma48(config)?,
        "prop410" => suite_prop410(config)?,
        "cor411" => suite_cor411(config)?,
        "cor416" => suite_cor416(config)?,
        "abel" => suite_abel(config)?,
        "thm418" => suite_thm418(config)?,
        "theorem1" => suite_theorem1(config)?,
        other => return Err(VconvError::UnknownSuite(other.to_string())),
    };
    Ok(ResidualReport::new(
        name,
        config.clone(),
        cases,
        start.elapsed().as_millis(),
    ))
}

fn random_point(n: usize, rng: &mut impl Rng) -> Point {
    let z: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let zeta: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.5..1.5)).collect();
    Point::new(n, z, zeta)
}

fn valid_q_range(n: usize, k: usize) -> impl Iterator<Item = usize> {
    (k.saturating_sub(n)..=k / 2).filter(move |q| k - q <= n)
}

// ---------------------------------------------------------------------------
// forms3: pointwise identities of the invariant algebra
// ---------------------------------------------------------------------------

fn suite_forms3(config: &ExperimentConfig) -> Result<Vec<CaseRecord>> {
    let mut cases = Vec::new();
    let tol_table = config.tolerance("forms3.contraction", 1e-12);
    let tol_prim = config.tolerance("forms3.primitive", 1e-10);
    let tol_mod = config.tolerance("forms3.mod_omega", 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x01);

    for n in 2..=3usize {
        // contraction table at 50 random points
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let p = random_point(n, &mut rng);
            let xg = TangentVector::x_gamma1(n, &p.z);
            let xb = TangentVector::x_beta1(n, &p.z);
            let g2 = invariant_form(FormName::Gamma2, &p);
            let b2 = invariant_form(FormName::Beta2, &p);
            let rows = [
                (contract(&xg, &invariant_form(FormName::Theta0, &p))?, MultiVector::zero(n)),
                (contract(&xg, &invariant_form(FormName::Theta1, &p))?, g2.scale(-1.0)),
                (contract(&xg, &invariant_form(FormName::Theta2, &p))?, b2.scale(-1.0)),
                (contract(&xb, &invariant_form(FormName::Theta0, &p))?, g2.clone()),
                (contract(&xb, &invariant_form(FormName::Theta1, &p))?, b2.clone()),
                (contract(&xb, &invariant_form(FormName::Theta2, &p))?, MultiVector::zero(n)),
            ];
            for (got, want) in rows {
                worst = worst.max(got.sub(&want)?.norm());
            }
        }
        cases.push(CaseRecord::residual(
            format!("contraction-table-n{n}"),
            "interior products of the radial fields against theta_0, theta_1, theta_2 match the six-entry table",
            worst,
            tol_table,
        ));

        // primitive-form identity on random primitive 2n-forms
        let ops = LefschetzOps::new(n);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let raw = random_homogeneous_form(n, 2 * n, &mut rng);
            let primitive = crate::exterior::lefschetz_decompose(&raw)?
                .into_iter()
                .next()
                .expect("decomposition has a top component");
            if primitive.norm() < 1e-8 {
                continue;
            }
            // at top half-degree primitivity is annihilation by one L step
            let lef = lefschetz_power(&primitive, 1).norm();
            if lef > 1e-9 * primitive.norm() {
                return Err(VconvError::SingularSystem("primitive projection"));
            }
            for _ in 0..5 {
                let p = random_point(n, &mut rng);
                if p.z_norm_sq() < 1e-2 {
                    continue;
                }
                let res = primitive_identity_residual(&primitive, &p)?;
                worst = worst.max(res / primitive.norm().max(1.0));
            }
        }
        cases.push(CaseRecord::residual(
            format!("primitive-identity-n{n}"),
            "|z|^2 w = gamma_1 ^ i_{X_beta1} w - beta_1 ^ i_{X_gamma1} w + omega_s ^ i_{X_gamma1} i_{X_beta1} w on primitive forms",
            worst,
            tol_prim,
        ));

        // mod-omega_s recursion for |z|^2 theta^n_{k,q}
        for k in 1..=2 * n {
            for q in valid_q_range(n, k) {
                let mut worst: f64 = 0.0;
                for _ in 0..50 {
                    let p = random_point(n, &mut rng);
                    let res = theta_recursion_residual(&ops, n, k, q, &p)?;
                    worst = worst.max(res);
                }
                cases.push(CaseRecord::residual(
                    format!("theta-recursion-n{n}-k{k}-q{q}"),
                    "|z|^2 theta^n_{k,q} = gamma_1 ^ [...] + beta_1 ^ [...] modulo omega_s",
                    worst,
                    tol_mod,
                ));
            }
        }
    }
    Ok(cases)
}

fn random_homogeneous_form(n: usize, degree: usize, rng: &mut impl Rng) -> MultiVector {
    // random combination of basis monomials of the given degree
    let masks = crate::exterior::basis_masks(n, degree);
    let mut form = MultiVector::zero(n);
    for _ in 0..12 {
        let mask = masks[rng.gen_range(0..masks.len())];
        let coeff = rng.gen_range(-1.0..1.0);
        let mut term = MultiVector::zero(n);
        // accumulate via the public surface: unit monomial scaled
        let mut unit = MultiVector::scalar(n, coeff);
        let mut rest = mask;
        while rest != 0 {
            let g = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            unit = unit.wedge(&MultiVector::generator(n, g)).expect("dim");
        }
        term = term.add(&unit).expect("dim");
        form = form.add(&term).expect("dim");
    }
    form
}

fn primitive_identity_residual(omega: &MultiVector, p: &Point) -> Result<f64> {
    let n = p.n;
    let zsq = p.z_norm_sq();
    let xg = TangentVector::x_gamma1(n, &p.z);
    let xb = TangentVector::x_beta1(n, &p.z);
    let g1 = invariant_form(FormName::Gamma1, p);
    let b1 = invariant_form(FormName::Beta1, p);
    let oms = invariant_form(FormName::OmegaS, p);
    let lhs = omega.scale(zsq);
    let rhs = g1
        .wedge(&contract(&xb, omega)?)?
        .sub(&b1.wedge(&contract(&xg, omega)?)?)?
        .add(&oms.wedge(&contract(&xg, &contract(&xb, omega)?)?)?)?;
    Ok(lhs.sub(&rhs)?.norm())
}

fn theta_recursion_residual(
    ops: &LefschetzOps,
    n: usize,
    k: usize,
    q: usize,
    p: &Point,
) -> Result<f64> {
    let (nn, kk, qq) = (n as i64, k as i64, q as i64);
    let zsq = p.z_norm_sq();
    let g1 = invariant_form(FormName::Gamma1, p);
    let g2 = invariant_form(FormName::Gamma2, p);
    let b1 = invariant_form(FormName::Beta1, p);
    let b2 = invariant_form(FormName::Beta2, p);
    let lhs = theta_kq(n, kk, qq).scale(zsq);
    let gamma_bracket = g2
        .wedge(&theta_kq_in(n, nn - 1, kk, qq))?
        .scale((nn - kk + qq) as f64)
        .add(&b2.wedge(&theta_kq_in(n, nn - 1, kk - 1, qq))?.scale((kk - 2 * qq) as f64))?;
    let beta_bracket = g2
        .wedge(&theta_kq_in(n, nn - 1, kk - 1, qq))?
        .scale((kk - 2 * qq) as f64)
        .add(&b2.wedge(&theta_kq_in(n, nn - 1, kk - 2, qq - 1))?.scale(qq as f64))?;
    let rhs = g1.wedge(&gamma_bracket)?.add(&b1.wedge(&beta_bracket)?)?;
    Ok(ops.mod_omega_s_residual(&lhs.sub(&rhs)?))
}

// ---------------------------------------------------------------------------
// detk
// ---------------------------------------------------------------------------

fn suite_detk(config: &ExperimentConfig) -> Result<Vec<CaseRecord>> {
    let mut cases = Vec::new();
    let tol = config.tolerance("detk.oracle", 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x02);

    for k in 1..=5usize {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let nblocks = rng.gen_range(1..=k.min(3));
            let mut ms = vec![1usize; nblocks];
            for _ in 0..k - nblocks {
                let i = rng.gen_range(0..nblocks);
                ms[i] += 1;
            }
            let blocks: Vec<(DMatrix<f64>, usize)> = ms
                .iter()
                .map(|&m| (DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0)), m))
                .collect();
            let fast = det_mixed(&blocks)?;
            let slow = det_mixed_leibniz_oracle(&blocks)?;
            worst = worst.max((fast - slow).abs() / (1.0 + slow.abs()));
        }
        cases.push(CaseRecord::residual(
            format!("oracle-match-k{k}"),
            "coefficient extraction agrees with full symbolic expansion of det(sum t_i M_i)",
            worst,
            tol,
        ));
    }

    // interpolation fallback at k = 6
    {
        let k = 6;
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let blocks: Vec<(DMatrix<f64>, usize)> = [2usize, 3, 1]
                .iter()
                .map(|&m| (DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0)), m))
                .collect();
            let fast = det_mixed(&blocks)?;
            let slow = det_mixed_leibniz_oracle(&blocks)?;
            worst = worst.max((fast - slow).abs() / (1.0 + slow.abs()));
        }
        cases.push(CaseRecord::residual(
            "oracle-match-k6-interpolated",
            "grid-evaluation fallback agrees with symbolic expansion",
            worst,
            config.tolerance("detk.interpolated", 1e-8),
        ));
    }

    // Tasaki factorization: det(s I_w + t R_w) = prod_j (t^2 + s^2 cos^2) (t odd):
    // equivalently det_mixed([(I,2j),(R,k-2j)]) = sigma_j(cos^2 theta).
    let mut worst: f64 = 0.0;
    for trial in 0..40 {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let k = rng.gen_range(2..=2 * n);
        let e = random_subspace_with(n, k, &mut rng)?;
        let w = tasaki_basis(&e)?;
        let angles = kahler_angles(&e)?;
        let cos2: Vec<f64> = angles.angles().iter().map(|a| a.cos().powi(2)).collect();
        let sigma = elementary_symmetric(&cos2);
        let gp = gram_pack(&w, &vec![0.0; 2 * n]);
        for (j, &sigma_j) in sigma.iter().enumerate().take(k / 2 + 1) {
            let mut blocks = Vec::new();
            if j > 0 {
                blocks.push((gp.i_w.clone(), 2 * j));
            }
            if k - 2 * j > 0 {
                blocks.push((gp.r_w.clone(), k - 2 * j));
            }
            let got = det_mixed(&blocks)?;
            worst = worst.max((got - sigma_j).abs());
        }
    }
    cases.push(CaseRecord::residual(
        "tasaki-determinant-factorization",
        "det(s I_w + t R_w) factors through the squared angle cosines on a Tasaki basis",
        worst,
        config.tolerance("detk.tasaki", 1e-10),
    ));
    Ok(cases)
}

// ---------------------------------------------------------------------------
// kahler
// ---------------------------------------------------------------------------

fn suite_kahler(config: &ExperimentConfig) -> Result<Vec<CaseRecord>> {
    let mut cases = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x03);
    let tol_inv = config.tolerance("kahler.invariance", 1e-10);
    let tol_extremal = config.tolerance("kahler.extremal", 1e-10);
    let tol_normal = config.tolerance("kahler.normal_form", 1e-10);

    let mut worst_inv: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for trial in 0..100 {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let k = rng.gen_range(1..=2 * n);
        let s = random_subspace_with(n, k, &mut rng)?;
        let angles = kahler_angles(&s)?;

        // invariance under re-orthonormalization of a random spanning set
        let span: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let coeffs: Vec<f64> = (0..k).map(|_| gaussian(&mut rng)).collect();
                s.embed(&coeffs)
            })
            .collect();
        if let Ok(s2) = Subspace::from_span(n, &span) {
            let angles2 = kahler_angles(&s2)?;
            for (a, b) in angles.angles().iter().zip(angles2.angles()) {
                worst_inv = worst_inv.max((a - b).abs());
            }
        }
        // invariance under the diagonal unitary action
        let u = random_unitary_real(n, &mut rng);
        let rotated: Vec<Vec<f64>> = s
            .basis()
            .iter()
            .map(|b| (&u * DVector::from_column_slice(b)).as_slice().to_vec())
            .collect();
        let s3 = Subspace::new(n, rotated)?;
        let angles3 = kahler_angles(&s3)?;
        for (a, b) in angles.angles().iter().zip(angles3.angles()) {
            worst_inv = worst_inv.max((a - b).abs());
        }
        // Tasaki normal form
        let t = tasaki_basis(&s)?;
        worst_norm = worst_norm.max(tasaki_normal_form_residual(&t)?);
    }
    cases.push(CaseRecord::residual(
        "angle-invariance",
        "Kähler angles are independent of the orthonormal basis and unitary-invariant",
        worst_inv,
        tol_inv,
    ));
    cases.push(CaseRecord::residual(
        "tasaki-normal-form",
        "the Tasaki basis puts the skew Gram matrix into 2x2 cosine blocks",
        worst_norm,
        tol_normal,
    ));

    let mut worst: f64 = 0.0;
    for n in 2..=3usize {
        for k in 1..=2 * n {
            for q in valid_q_range(n, k) {
                let e = extremal_subspace(n, k, q)?;
                let angles = kahler_angles(&e)?;
                for (j, &a) in angles.angles().iter().enumerate() {
                    let want = if j < q { 0.0 } else { std::f64::consts::FRAC_PI_2 };
                    worst = worst.max((a - want).abs());
                }
            }
        }
    }
    cases.push(CaseRecord::residual(
        "extremal-angles",
        "E_{k,q} has q zero angles and floor(k/2) - q right angles",
        worst,
        tol_extremal,
    ));
    Ok(cases)
}

// ---------------------------------------------------------------------------
// prop45
// ---------------------------------------------------------------------------

fn suite_prop45(config: &ExperimentConfig) -> Result<Vec<CaseRecord>> {
    let mut cases = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x04);
    let tol_delta = config.tolerance("prop45.delta", 1e-9);
    let tol_fact = config.tolerance("prop45.factorization", 1e-9);

    // Klain delta values on extremal subspaces, all valid (k, q, p), n in {2,3}
    for n in 2..=3usize {
        let mut worst: f64 = 0.0;
        for k in 1..=2 * n {
            for p in valid_q_range(n, k) {
                let e_kp = extremal_subspace(n, k, p)?;
                for _ in 0..20 {
                    let vs: Vec<Vec<f64>> = (0..k)
                        .map(|_| {
                            let coeffs: Vec<f64> =
                                (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
                            e_kp.embed(&coeffs)
                        })
                        .collect();
                    let w = VectorTuple::new(n, vs)?;
                    let det_gram = gram_pack(&w, &vec![0.0; 2 * n])
                        .r_w
                        .lu()
                        .determinant();
                    if det_gram.abs() < 1e-6 {
                        continue;
                    }
                    for q in valid_q_range(n, k) {
                        let delta = if p == q { 1.0 } else { 0.0 };
                        let got = p_kq(&w, q as i64)? / det_gram;
                        worst = worst.max((got - delta).abs());
                    }
                }
            }
        }
        cases.push(CaseRecord::residual(
            format!("klain-delta-n{n}"),
            "P_{k,q}(w) / det(Re-Gram) takes the value delta_{pq} on bases of E_{k,p}",
            worst,
            tol_delta,
        ));
    }

    // factorization on 100 random subspaces and tuples, k <= 4
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let k = rng.gen_range(1..=(2 * n).min(4));
        let s = random_subspace_with(n, k, &mut rng)?;
        let vs: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let coeffs: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
                s.embed(&coeffs)
            })
            .collect();
        let w = VectorTuple::new(n, vs)?;
        let det_gram = gram_pack(&w, &vec![0.0; 2 * n]).r_w.lu().determinant();
        for q in 0..=(k as i64 / 2) {
            let lhs = p_kq(&w, q)?;
            let rhs = det_gram * klain_mu_kq(&s, q)?;
            worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
        }
    }
    cases.push(CaseRecord::residual(
        "factorization-random",
        "P_{k,q}(w) = det(Re-Gram) Kl_{mu_{k,q}}(E) on random subspace/tuple pairs",
        worst,
        tol_fact,
    ));
    Ok(cases)
}

// ---------------------------------------------------------------------------
// cor49
// ---------------------------------------------------------------------------

fn suite_cor49(config: &ExperimentConfig) -> Result<Vec<CaseRecord>> {
    let mut cases = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x05);
    let tol_closed = config.tolerance("cor49.closed_form", 1e-9);
    let tol_vanish = config.tolerance("cor49.vanishing", 1e-10);

    let mut worst_closed: f64 = 0.0;
    let mut worst_vanish: f64 = 0.0;
    let mut count = 0;
    'outer: for trial in 0..1000 {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let k = rng.gen_range(1..=(2 * n).min(5));
        let ps: Vec<usize> = valid_q_range(n, k).collect();
        let p = ps[rng.gen_range(0..ps.len())];
        let e_kp = extremal_subspace(n, k, p)?;
        let vs: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let coeffs: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
                e_kp.embed(&coeffs)
            })
            .collect();
        let w = VectorTuple::new(n, vs)?;
        let det_gram = gram_pack(&w, &vec![0.0; 2 * n]).r_w.lu().determinant();
        if det_gram.abs() < 1e-5 {
            continue;
        }
        let z: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for q in 0..=(k as i64 / 2) {
            let sb = symbol_beta(&w, q, &z)?;
            let sg = symbol_gamma(&w, q, &z)?;
            if q == p as i64 {
                let zsq: f64 = (0..p).map(|j| z[j] * z[j] + z[n + j] * z[n + j]).sum();
                let rsq: f64 = (p..k - p).map(|j| z[j] * z[j]).sum();
                worst_closed = worst_closed
                    .max((sb - det_gram * zsq).abs() / (1.0 + det_gram.abs()))
                    .max((sg - det_gram * rsq).abs() / (1.0 + det_gram.abs()));
            } else {
                worst_vanish = worst_vanish.max(sb.abs()).max(sg.abs());
            }
        }
        count += 1;
        if count >= 100 {
            break 'outer;
        }
    }
    cases.push(CaseRecord::residual(
        "closed-forms-on-extremal",
        "on E_{k,q} tuples: beta symbol = det * sum |z_j|^2 over complex slots, gamma symbol = det * sum (Re z_j)^2 over real slots",
        worst_closed,
        tol_closed,
    ));
    cases.push(CaseRecord::residual(
        "cross-q-vanishing",
        "both symbols vanish on E_{k,p} tuples when q differs from p",
        worst_vanish,
        tol_vanish,
    ));
    Ok(cases)
}

// ---------------------------------------------------------------------------
// lemma48
// ---------------------------------------------------------------------------

fn suite_lemma48(config: &ExperimentConfig) -> Result<Vec<CaseRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x06);
    let tol = config.tolerance("lemma48.oracle", 1e-10);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let k = rng.gen_range(2..=2 * n);
        let s = random_subspace_with(n, k, &mut rng)?;
        let w = tasaki_basis(&s)?;
        let z: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for q in 0..=(k as i64 / 2) {
            let (beta_closed, gamma_closed) = tasaki_closed_forms(&w, q, &z)?;
            let (beta_det, gamma_det) = symbol_blocks_via_det(&w, q, &z)?;
            worst = worst
                .max((beta_closed - beta_det).abs())
                .max((gamma_closed - gamma_det).abs());
        }
    }
    Ok(vec![CaseRecord::residual(
        "closed-form-vs-det",
        "the two symbol building blocks computed by det_mixed equal their Tasaki closed-form sums",
        worst,
        tol,
    )])
}

// ---------------------------------------------------------------------------
// prop410: the real-slice transform identities
// ---------------------------------------------------------------------------

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sinh() / x
    }
}

fn cosh_sinhc_quot(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        1.0 / 3.0 + x * x / 30.0 + x.powi(4) / 840.0
    } else {
        (x.cosh() - x.sinh() / x) / (x * x)
    }
}

/// Laplace-slice moments of a radial line profile against the operator
/// kernels: returns (int g t^2 sinhc, int g t^4 (cosh - sinhc)/x^2) doubled.
fn operator_moments(line: &dyn Profile, r: f64, order: usize) -> (f64, f64) {
    let radius = line.radius();
    let t1 = 2.0 * integrate_1d(order, 0.0, radius, |t| line.eval(t) * t * t * sinhc(t * r));
    let t2 = 2.0
        * integrate_1d(order, 0.0, radius, |t| {
            line.eval(t) * t.powi(4) * cosh_sinhc_quot(t * r)
        });
    (t1, t2)
}

fn sample_ball(dim: usize, radius: f64, rng: &mut impl Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let scale = radius * rng.gen_range(0.0f64..1.0).powf(1.0 / dim as f64) / norm;
    v.iter().map(|a| a * scale).collect()
}

fn suite_prop410(config: &ExperimentConfig) -> Result<Vec<CaseRecord>> {
    let n = 2usize;
    let mut cases = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x07);
    let tol = config.tolerance("prop410.identity", 1e-4);
    let density = default_density(config);
    let spatial: Arc<dyn Profile> = Arc::new(SpatialBump::new(density.clone()));
    let line = Arc::new(AbelOf::new(spatial, 2 * n - 1, config.profile_order));
    let radius = line.radius();
    let tuples_per_case = 25usize;
    let ymax = 8.0 / radius;

    for k in 2..=3usize {
        for q in valid_q_range(n, k) {
            // Theta family: polarization = (1/k!) P_{k,q}(y) Laplace(phi)(|sum y|)
            let spec = SmoothValuationSpec::theta_family(n, k, q, density.clone())?;
            let v = QuadratureValuation {
                spec: &spec,
                order: config.base_order,
            };
            let mut worst: f64 = 0.0;
            for _ in 0..tuples_per_case {
                let ys: Vec<Vec<f64>> =
                    (0..k).map(|_| sample_ball(2 * n, ymax, &mut rng)).collect();
                let lhs = gw_slice(&v, &ys)?;
                let w = VectorTuple::new(n, ys.clone())?;
                let u = tuple_sum(&ys);
                let r = norm(&u);
                let lap = 2.0
                    * integrate_1d(config.profile_order, 0.0, radius, |t| {
                        line.eval(t) * (t * r).cosh()
                    });
                let rhs = p_kq(&w, q as i64)? * lap / crate::exterior::factorial(k as i64);
                worst = worst.max(relative_gap(lhs, rhs));
            }
            cases.push(CaseRecord::residual(
                format!("theta-slice-k{k}-q{q}"),
                "polarization on exponentials equals P_{k,q}(y)/k! times the radial Laplace transform",
                worst,
                tol,
            ));
        }

        // beta family (q >= max(1, k - n))
        for q in (k.saturating_sub(n)).max(1)..=k / 2 {
            let spec = SmoothValuationSpec::beta_family(n, k, q, density.clone())?;
            let v = QuadratureValuation {
                spec: &spec,
                order: config.base_order,
            };
            let mut worst: f64 = 0.0;
            for _ in 0..tuples_per_case {
                let ys: Vec<Vec<f64>> =
                    (0..k).map(|_| sample_ball(2 * n, ymax, &mut rng)).collect();
                let lhs = gw_slice(&v, &ys)?;
                let rhs = symbol_slice_rhs(
                    &ys,
                    line.as_ref(),
                    config.profile_order,
                    SymbolKind::Beta,
                    q,
                    k,
                    n,
                )?;
                worst = worst.max(relative_gap(lhs, rhs));
            }
            cases.push(CaseRecord::residual(
                format!("beta-slice-k{k}-q{q}"),
                "polarization of the beta family equals the beta-symbol multiplier acting on the Laplace transform",
                worst,
                tol,
            ));
        }

        // gamma family (q <= floor((k-1)/2))
        for q in k.saturating_sub(n)..=(k - 1) / 2 {
            let spec = SmoothValuationSpec::gamma_family(n, k, q, density.clone())?;
            let v = QuadratureValuation {
                spec: &spec,
                order: config.base_order,
            };
            let mut worst: f64 = 0.0;
            for _ in 0..tuples_per_case {
                let ys: Vec<Vec<f64>> =
                    (0..k).map(|_| sample_ball(2 * n, ymax, &mut rng)).collect();
                let lhs = gw_slice(&v, &ys)?;
                let rhs = symbol_slice_rhs(
                    &ys,
                    line.as_ref(),
                    config.profile_order,
                    SymbolKind::Gamma,
                    q,
                    k,
                    n,
                )?;
                worst = worst.max(relative_gap(lhs, rhs));
            }
            cases.push(CaseRecord::residual(
                format!("gamma-slice-k{k}-q{q}"),
                "polarization of the gamma family equals the gamma-symbol multiplier acting on the Laplace transform",
                worst,
                tol,
            ));
        }
    }
    Ok(cases)
}

enum SymbolKind {
    Beta,
    Gamma,
}

fn symbol_slice_rhs(
    ys: &[Vec<f64>],
    line: &dyn Profile,
    order: usize,
    kind: SymbolKind,
    q: usize,
    k: usize,
    n: usize,
) -> Result<f64> {
    let w = VectorTuple::new(n, ys.to_vec())?;
    let u = tuple_sum(ys);
    let r = norm(&u);
    let (t1, t2) = operator_moments(line, r, order);
    let eval = |z: &[f64]| -> Result<f64> {
        match kind {
            SymbolKind::Beta => symbol_beta(&w, q as i64, z),
            SymbolKind::Gamma => symbol_gamma(&w, q as i64, z),
        }
    };
    let mut trace = 0.0;
    for alpha in 0..2 * n {
        let mut e = vec![0.0; 2 * n];
        e[alpha] = 1.0;
        trace += eval(&e)?;
    }
    let s_u = eval(&u)?;
    let denom = match kind {
        SymbolKind::Beta => q as f64,
        SymbolKind::Gamma => (k - 2 * q) as f64,
    };
    Ok((trace * t1 + s_u * t2) / (crate::exterior::factorial(k as i64) * denom))
}

fn tuple_sum(ys: &[Vec<f64>]) -> Vec<f64> {
    let d = ys[0].len();
    let mut u = vec![0.0; d];
    for y in ys {
        for (a, b) in u.iter_mut().zip(y) {
            *a += b;
        }
    }
    u
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn relative_gap(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(lhs.abs()).max(1e-12)
}

fn default_density(config: &ExperimentConfig) -> RadialDensity {
    config
        .densities
        .iter()
        .find_map(|qd| qd.phi.as_ref())
        .map(|d| d.build().expect("validated config"))
        .unwrap_or_else(|| RadialDensity::damped(1.0, 4).expect("valid bump"))
}

// ---------------------------------------------------------------------------
// cor411: restriction vanishing
// ---------------------------------------------------------------------------

fn test_battery(dim: usize, rng: &mut impl Rng) -> Vec<SmoothConvexFunction> {
    let mut out = Vec::new();
    for i in 0..10 {
        let f = match i % 3 {
            0 => {
                let m = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-0.6..0.6));
                let a = &m * m.transpose() + DMatrix::identity(dim, dim) * 0.3;
                SmoothConvexFunction::quadratic(a, DVector::zeros(dim), 0.0).expect("psd")
            }
            1 => {
                let terms = (0..2)
                    .map(|_| {
                        (
                            rng.gen_range(0.3..1.0),
                            (0..dim).map(|_| rng.gen_range(-0.9..0.9)).collect(),
                        )
                    })
                    .collect();
                SmoothConvexFunction::exp_combination(dim, terms).expect("valid")
            }
            _ => SmoothConvexFunction::Sum(vec![
                SmoothConvexFunction::smooth_norm(dim, rng.gen_range(0.5..1.5)).expect("valid"),
                SmoothConvexFunction::exp_linear(
                    &(0..dim)
                        .map(|_| rng.gen_range(-0.7..0.7))
                        .collect::<Vec<_>>(),
                ),
            ]),
        };
        out.push(f);
    }
    out
}

fn suite_cor411(config: &ExperimentConfig) -> Result<Vec<CaseRecord>> {
    let n = 2usize;
    let mut cases = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x08);
    let tol = config.tolerance("cor411.vanishing", 1e-4);
    let density = default_density(config);

    for k in 2..=3usize {
        for q in valid_q_range(n, k) {
            // all three families at this q; the theta family restricts to a
            // pointwise-zero pullback on foreign extremal subspaces, while the
            // beta/gamma pullbacks only vanish through the integration
            let mut family_specs: Vec<(&str, SmoothValuationSpec)> = vec![(
                "theta",
                SmoothValuationSpec::theta_family(n, k, q, density.clone())?,
            )];
            if q >= 1 {
                family_specs.push((
                    "beta",
                    SmoothValuationSpec::beta_family(n, k, q, density.clone())?,
                ));
            }
            if 2 * q < k {
                family_specs.push((
                    "gamma",
                    SmoothValuationSpec::gamma_family(n, k, q, density.clone())?,
                ));
            }
            for (family, spec) in &family_specs {
                let battery = test_battery(k, &mut rng);
                // scale: restriction to the subspace with p = q
                let own = extremal_subspace(n, k, q)?;
                let own_restricted = RestrictedValuation::new(spec, own, config.base_order);
                let scale = battery
                    .iter()
                    .map(|f| own_restricted.apply(f).map(f64::abs))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0f64, f64::max);
                for p in valid_q_range(n, k) {
                    if p == q {
                        continue;
                    }
                    let foreign = extremal_subspace(n, k, p)?;
                    let restricted = RestrictedValuation::new(spec, foreign, config.base_order);
                    let mut worst: f64 = 0.0;
                    for f in &battery {
                        worst = worst.max(restricted.apply(f)?.abs());
                    }
                    cases.push(CaseRecord::residual(
                        format!("vanishing-{family}-k{k}-q{q}-on-p{p}"),
                        "the family valuation restricted to E_{k,p} vanishes for p != q (scaled by the p = q magnitude)",
                        worst / scale.max(1e-300),
                        tol,
                    ));
                }
            }
        }
    }
    Ok(cases)
}

// ---------------------------------------------------------------------------
// cor416: restriction density consistency
// ---------------------------------------------------------------------------

fn suite_cor416(config: &ExperimentConfig) -> Result<Vec<CaseRecord>> {
    let n = 2usize;
    let mut cases = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x09);
    let tol = config.tolerance("cor416.consistency", 1e-3);
    let phi = default_density(config);
    let psi = phi.times_poly(&[0.6, 0.8])?;

    for k in 2..=3usize {
        for q in valid_q_range(n, k) {
            let mut terms = vec![crate::valuation::ValuationTerm::Theta {
                q,
                density: phi.clone(),
            }];
            let interior = q >= 1 && 2 * q < k;
            if interior {
                terms.push(crate::valuation::ValuationTerm::Upsilon {
                    q,
                    density: psi.clone(),
                });
            }
            let spec = SmoothValuationSpec::new(n, k, terms)?;
            let pair = densities_from_spec(&spec, q, config.profile_order)?;
            let e = extremal_subspace(n, k, q)?;
            let restricted = RestrictedValuation::new(&spec, e.clone(), config.base_order);
            let battery = test_battery(k, &mut rng);
            let mut worst: f64 = 0.0;
            for f in &battery {
                // route 1: full-dimensional differential-cycle quadrature
                let full = restricted.apply(f)?;
                // route 2: k-dimensional integral of the density against det D^2 f
                let pair_ref = &pair;
                let density_fn = move |x: &[f64]| -> f64 {
                    let zsq: f64 = x[..2 * q].iter().map(|v| v * v).sum();
                    let xsq: f64 = x[2 * q..].iter().map(|v| v * v).sum();
                    let r2 = zsq + xsq;
                    if r2 < 1e-24 {
                        pair_ref.a(0.0)
                    } else {
                        let r = r2.sqrt();
                        (zsq * pair_ref.a(r) + xsq * pair_ref.b(r)) / r2
                    }
                };
                let low = monge_ampere(&density_fn, pair.radius(), f, 2 * config.base_order)?;
                worst = worst.max(relative_gap(full, low));
            }
            cases.push(CaseRecord::residual(
                format!("density-consistency-k{k}-q{q}"),
                "the forward Abel densities reproduce the restricted valuation against det D^2 f",
                worst,
                tol,
            ));
        }
    }
    Ok(cases)
}

// ---------------------------------------------------------------------------
// abel
// ---------------------------------------------------------------------------

fn suite_abel(config: &ExperimentConfig) -> Result<Vec<CaseRecord>> {
    let mut cases = Vec::new();
    let order = config.profile_order.max(128);
    let tol_round = config.tolerance("abel.roundtrip", 1e-6);
    let tol_gauss = config.tolerance("abel.gaussian", 1e-5);
    let tol_compose = config.tolerance("abel.composition", 1e-8);

    // round trips on smooth bumps
    let bump = default_density(config);
    let p: Arc<dyn Profile> = Arc::new(SpatialBump::new(bump));
    let forward = AbelOf::new(p.clone(), 1, order);
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        let t = p.radius() * i as f64 / 40.0;
        let back = abel_inverse_with_order(&forward, t, order);
        worst = worst.max((back - p.eval(t)).abs());
    }
    cases.push(CaseRecord::residual(
        "roundtrip-inverse-of-forward",
        "the inverse transform undoes the forward transform on smooth bumps (sup norm)",
        worst,
        tol_round,
    ));

    // the opposite composition: forward of inverse
    let inverse_profile = {
        struct InverseOf {
            psi: Arc<dyn Profile>,
            order: usize,
        }
        impl Profile for InverseOf {
            fn eval(&self, r: f64) -> f64 {
                abel_inverse_with_order(self.psi.as_ref(), r, self.order)
            }
            fn radius(&self) -> f64 {
                self.psi.radius()
            }
        }
        InverseOf {
            psi: p.clone(),
            order,
        }
    };
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        let t = p.radius() * i as f64 / 40.0;
        let again = abel_m_with_order(&inverse_profile, 1, t, order);
        worst = worst.max((again - p.eval(t)).abs());
    }
    cases.push(CaseRecord::residual(
        "roundtrip-forward-of-inverse",
        "the forward transform undoes the inverse transform on smooth bumps (sup norm)",
        worst,
        tol_round,
    ));

    // Gaussian analytic identity
    let g = FnProfile {
        f: |r: f64| (-r * r).exp(),
        df: |r: f64| -2.0 * r * (-r * r).exp(),
        radius: 12.0,
    };
    let mut worst: f64 = 0.0;
    for i in 0..=30 {
        let t = 3.0 * i as f64 / 30.0;
        let fwd = abel_m_with_order(&g, 1, t, 200);
        worst = worst.max((fwd - std::f64::consts::PI.sqrt() * (-t * t).exp()).abs());
    }
    let forward_g = AbelOf::new(Arc::new(g), 1, 200);
    for i in 0..=30 {
        let t = 3.0 * i as f64 / 30.0;
        let back = abel_inverse_with_order(&forward_g, t, 200);
        worst = worst.max((back - (-t * t).exp()).abs());
    }
    cases.push(CaseRecord::residual(
        "gaussian-identity",
        "the transform maps exp(-r^2) to sqrt(pi) exp(-t^2) and the inverse recovers it on [0, 3]",
        worst,
        tol_gauss,
    ));

    // iterate composition: A^2 = A o A
    let mut worst: f64 = 0.0;
    let once = AbelOf::new(p.clone(), 1, order);
    for i in 0..=20 {
        let t = p.radius() * i as f64 / 20.0;
        let direct = abel_m_with_order(p.as_ref(), 2, t, order);
        let composed = abel_m_with_order(&once, 1, t, order);
        worst = worst.max((direct - composed).abs() / (1.0 + direct.abs()));
    }
    cases.push(CaseRecord::residual(
        "iterate-composition",
        "the m-fold radial formula agrees with repeated single transforms",
        worst,
        tol_compose,
    ));
    Ok(cases)
}

// ---------------------------------------------------------------------------
// thm418: end-to-end reconstruction
// ---------------------------------------------------------------------------

fn suite_thm418(config: &ExperimentConfig) -> Result<Vec<CaseRecord>> {
    let n = 2usize;
    let mut cases = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x0a);
    let tol = config.tolerance("thm418.reconstruction", 1e-3);
    let phi = default_density(config);
    let psi = phi.times_poly(&[0.5, 1.0])?;
    let tuples = 25usize;

    for k in 3..=4usize {
        // mixed valuation: Theta at every admissible q, Upsilon at interior q
        let mut terms = Vec::new();
        for q in valid_q_range(n, k) {
            let shape = phi.times_poly(&[1.0, 0.3 * q as f64])?;
            terms.push(crate::valuation::ValuationTerm::Theta { q, density: shape });
            if q >= 1 && 2 * q < k {
                terms.push(crate::valuation::ValuationTerm::Upsilon {
                    q,
                    density: psi.clone(),
                });
            }
        }
        let spec = SmoothValuationSpec::new(n, k, terms)?;
        let v = QuadratureValuation {
            spec: &spec,
            order: config.base_order,
        };

        // densities of the restrictions to every extremal subspace
        let pairs: Vec<(usize, crate::transforms::DensityPair)> = valid_q_range(n, k)
            .map(|q| Ok((q, densities_from_spec(&spec, q, config.profile_order)?)))
            .collect::<Result<Vec<_>>>()?;
        let data = ReconstructionData::from_pairs(n, k, &pairs, config.profile_order)?;

        let ymax = 6.0 / spec.spatial_radius();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        let mut gaps: Vec<(f64, f64)> = Vec::new();
        for _ in 0..tuples {
            let ys: Vec<Vec<f64>> = (0..k).map(|_| sample_ball(2 * n, ymax, &mut rng)).collect();
            let direct = gw_slice(&v, &ys)?;
            let rebuilt = crate::transforms::reconstruct_gw(&data, &ys)?;
            scale = scale.max(direct.abs());
            gaps.push((direct, rebuilt));
        }
        for (direct, rebuilt) in gaps {
            worst = worst.max((direct - rebuilt).abs() / direct.abs().max(0.05 * scale));
        }
        cases.push(CaseRecord::residual(
            format!("reconstruction-k{k}"),
            "the transform rebuilt from extremal restriction densities matches direct polarization at random slices",
            worst,
            tol,
        ));
    }
    Ok(cases)
}

// ---------------------------------------------------------------------------
// theorem1: separation through the extremal data
// ---------------------------------------------------------------------------

fn suite_theorem1(config: &ExperimentConfig) -> Result<Vec<CaseRecord>> {
    let n = 2usize;
    let mut cases = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x0b);
    let tol_vanish = config.tolerance("theorem1.vanishing", 1e-6);
    let tol_rebuild = config.tolerance("theorem1.rebuild", 1e-3);
    let phi = default_density(config);

    for k in 2..=3usize {
        let qs: Vec<usize> = valid_q_range(n, k).collect();
        for &q0 in &qs {
            let spec = SmoothValuationSpec::theta_family(n, k, q0, phi.clone())?;
            let v = QuadratureValuation {
                spec: &spec,
                order: config.base_order,
            };
            // scale from tuples inside the valuation's own extremal subspace
            let own = extremal_subspace(n, k, q0)?;
            let ymax = 4.0 / spec.spatial_radius();
            let mut scale: f64 = 0.0;
            for _ in 0..5 {
                let ys: Vec<Vec<f64>> = (0..k)
                    .map(|_| {
                        let coords = sample_ball(k, ymax, &mut rng);
                        own.embed(&coords)
                    })
                    .collect();
                scale = scale.max(gw_slice(&v, &ys)?.abs());
            }
            // slices on foreign extremal tuples vanish
            for &p in &qs {
                if p == q0 {
                    continue;
                }
                let foreign = extremal_subspace(n, k, p)?;
                let mut worst: f64 = 0.0;
                for _ in 0..5 {
                    let ys: Vec<Vec<f64>> = (0..k)
                        .map(|_| {
                            let coords = sample_ball(k, ymax, &mut rng);
                            foreign.embed(&coords)
                        })
                        .collect();
                    worst = worst.max(gw_slice(&v, &ys)?.abs());
                }
                cases.push(CaseRecord::residual(
                    format!("slice-vanishing-k{k}-q{q0}-on-p{p}"),
                    "slices of a single-q valuation on tuples from a foreign extremal subspace vanish",
                    worst / scale.max(1e-300),
                    tol_vanish,
                ));
            }
            // and the valuation is rebuilt from its extremal data alone
            let pairs: Vec<(usize, crate::transforms::DensityPair)> = qs
                .iter()
                .map(|&q| Ok((q, densities_from_spec(&spec, q, config.profile_order)?)))
                .collect::<Result<Vec<_>>>()?;
            let data = ReconstructionData::from_pairs(n, k, &pairs, config.profile_order)?;
            let mut worst: f64 = 0.0;
            let mut scale: f64 = 0.0;
            let mut gaps = Vec::new();
            for _ in 0..8 {
                let ys: Vec<Vec<f64>> =
                    (0..k).map(|_| sample_ball(2 * n, ymax, &mut rng)).collect();
                let direct = gw_slice(&v, &ys)?;
                let rebuilt = crate::transforms::reconstruct_gw(&data, &ys)?;
                scale = scale.max(direct.abs());
                gaps.push((direct, rebuilt));
            }
            for (direct, rebuilt) in gaps {
                worst = worst.max((direct - rebuilt).abs() / direct.abs().max(0.05 * scale));
            }
            cases.push(CaseRecord::residual(
                format!("rebuild-k{k}-q{q0}"),
                "a single-q valuation is recovered from its own extremal restriction data",
                worst,
                tol_rebuild,
            ));
        }
    }
    Ok(cases)
}

//! The invariant polynomials P_{k,q} on tuples of vectors in C^n, the Klain
//! function of the Hermitian intrinsic volumes, and the symbols of the
//! beta/gamma families of equivariant differential operators.
//!
//! All sums follow the empty-sum-is-zero convention outside their declared
//! index ranges, so call sites never need case distinctions.

use crate::error::{Result, VconvError};
use crate::grassmann::{kahler_angles, tasaki_normal_form_residual, Subspace};
use crate::mixed::{det_mixed, gram_pack, VectorTuple};

/// Binomial coefficient that vanishes for any out-of-range arguments.
pub fn binom(a: i64, b: i64) -> f64 {
    if b < 0 || a < 0 || b > a {
        return 0.0;
    }
    let b = b.min(a - b);
    let mut v = 1.0;
    for i in 0..b {
        v = v * (a - i) as f64 / (i + 1) as f64;
    }
    v
}

/// P_{k,q}(w) = sum_{j=q}^{floor(k/2)} (-1)^{j-q} C(j,q)
///              det_k(I_w[2j], R_w[k-2j]).
///
/// Symmetric in the tuple entries, U(n)-invariant, and for w inside a k-plane
/// E equal to det(Re-Gram) times the Klain function of mu_{k,q} at E.
pub fn p_kq(w: &VectorTuple, q: i64) -> Result<f64> {
    let k = w.k() as i64;
    let gp = gram_pack(w, &vec![0.0; 2 * w.n()]);
    let mut total = 0.0;
    for j in q.max(0)..=(k / 2) {
        let coeff = binom(j, q);
        if coeff == 0.0 {
            continue;
        }
        let sign = if (j - q) % 2 == 0 { 1.0 } else { -1.0 };
        let mut blocks = Vec::new();
        if j > 0 {
            blocks.push((gp.i_w.clone(), (2 * j) as usize));
        }
        if k - 2 * j > 0 {
            blocks.push((gp.r_w.clone(), (k - 2 * j) as usize));
        }
        total += sign * coeff * det_mixed(&blocks)?;
    }
    Ok(total)
}

/// Klain function of mu_{k,q} from the Kähler angles of E:
/// sum_{i=q}^{floor(k/2)} (-1)^{i-q} C(i,q) sigma_i(cos^2 theta(E)).
pub fn klain_mu_kq(e: &Subspace, q: i64) -> Result<f64> {
    let angles = kahler_angles(e)?;
    let cos2: Vec<f64> = angles.angles().iter().map(|t| t.cos().powi(2)).collect();
    let half = e.k() as i64 / 2;
    let sigmas = elementary_symmetric(&cos2);
    let mut total = 0.0;
    for i in q.max(0)..=half {
        let c = binom(i, q);
        if c == 0.0 {
            continue;
        }
        let sign = if (i - q) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * c * sigmas[i as usize];
    }
    Ok(total)
}

/// All elementary symmetric polynomials sigma_0..sigma_m of the given values.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut sigma = vec![0.0; values.len() + 1];
    sigma[0] = 1.0;
    for &v in values {
        for i in (1..sigma.len()).rev() {
            sigma[i] += v * sigma[i - 1];
        }
    }
    sigma
}

/// Symbol of the beta-family operator:
/// -(1/2) sum_{j=max(q,1)}^{floor(k/2)} (-1)^{j-q} C(j-1, q-1)
///        det_k(I_w[2j-1], Z^I_w(z), R_w[k-2j]).
///
/// A skew trace identity fixes the overall sign: on a complex pair
/// (e_1, i e_1) the single surviving block det evaluates to -2 |z_1|^2, and
/// the sign above is the one for which the symbol restricted to an extremal
/// tuple comes out as + det(Re-Gram) sum_{j<=q} |z_j|^2 and for which the
/// gamma symbol cancels on complex lines. Vanishes identically for q <= 0 and
/// for R-linearly dependent tuples.
pub fn symbol_beta(w: &VectorTuple, q: i64, z: &[f64]) -> Result<f64> {
    let k = w.k() as i64;
    if z.len() != 2 * w.n() {
        return Err(VconvError::DimensionMismatch {
            expected: 2 * w.n(),
            got: z.len(),
        });
    }
    let gp = gram_pack(w, z);
    let mut total = 0.0;
    for j in q.max(1)..=(k / 2) {
        let coeff = binom(j - 1, q - 1);
        if coeff == 0.0 {
            continue;
        }
        let sign = if (j - q) % 2 == 0 { 1.0 } else { -1.0 };
        let mut blocks = vec![(gp.z_i.clone(), 1usize)];
        if 2 * j - 1 > 0 {
            blocks.push((gp.i_w.clone(), (2 * j - 1) as usize));
        }
        if k - 2 * j > 0 {
            blocks.push((gp.r_w.clone(), (k - 2 * j) as usize));
        }
        total += sign * coeff * det_mixed(&blocks)?;
    }
    Ok(-0.5 * total)
}

/// Symbol of the gamma-family operator:
/// sum_{j=q}^{floor((k-1)/2)} (-1)^{j-q} C(j,q)
///   det_k(I_w[2j], Z^R_w(z), R_w[k-1-2j])  -  symbol_beta(w, q+1, z).
pub fn symbol_gamma(w: &VectorTuple, q: i64, z: &[f64]) -> Result<f64> {
    let k = w.k() as i64;
    if z.len() != 2 * w.n() {
        return Err(VconvError::DimensionMismatch {
            expected: 2 * w.n(),
            got: z.len(),
        });
    }
    let gp = gram_pack(w, z);
    let mut total = 0.0;
    for j in q.max(0)..=((k - 1) / 2) {
        let coeff = binom(j, q);
        if coeff == 0.0 {
            continue;
        }
        let sign = if (j - q) % 2 == 0 { 1.0 } else { -1.0 };
        let mut blocks = vec![(gp.z_r.clone(), 1usize)];
        if j > 0 {
            blocks.push((gp.i_w.clone(), (2 * j) as usize));
        }
        if k - 1 - 2 * j > 0 {
            blocks.push((gp.r_w.clone(), (k - 1 - 2 * j) as usize));
        }
        total += sign * coeff * det_mixed(&blocks)?;
    }
    Ok(total - symbol_beta(w, q + 1, z)?)
}

/// Closed forms of the two symbol building blocks on a Tasaki basis, used as
/// an independent oracle for the det_mixed route:
///
/// det_k(I[2q-1], Z^I, R[k-2q]) = -2 sum_{|T| = q-1} sum_{i not in T}
///     (prod_{j in T} cos^2 t_j) cos t_i  Z^I_{2i-1, 2i}
///
/// det_k(I[2q], Z^R, R[k-2q-1]) = sum_{|T| = q} sum_{i not in T}
///     (prod cos^2) (Z^R_{2i-1,2i-1} + Z^R_{2i,2i})
///   + [k odd] sum_{|T| = q} (prod cos^2) Z^R_{k,k},
///
/// with T ranging over subsets of {1..floor(k/2)}, the Z entries indexed by
/// the Tasaki ordering, and the leading sign of the skew display fixed by the
/// trace identity tr(adj(A) Z^I) = 2 s I_{12} Z^I_{12} on each 2x2 block.
/// Requires the tuple to pass the normal-form check.
pub fn tasaki_closed_forms(w: &VectorTuple, q: i64, z: &[f64]) -> Result<(f64, f64)> {
    let residual = tasaki_normal_form_residual(w)?;
    if residual > 1e-10 {
        return Err(VconvError::NotTasaki(residual));
    }
    let k = w.k();
    let half = k / 2;
    let gp = gram_pack(w, z);
    let cos: Vec<f64> = (0..half).map(|b| gp.i_w[(2 * b + 1, 2 * b)]).collect();

    let subsets = |size: i64| -> Vec<Vec<usize>> {
        if size < 0 || size as usize > half {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn rec(
            start: usize,
            left: usize,
            half: usize,
            current: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if left == 0 {
                out.push(current.clone());
                return;
            }
            for i in start..half {
                current.push(i);
                rec(i + 1, left - 1, half, current, out);
                current.pop();
            }
        }
        rec(0, size as usize, half, &mut current, &mut out);
        out
    };

    // skew display (valid for 1 <= q <= floor(k/2))
    let mut beta_side = 0.0;
    if q >= 1 && q as usize <= half {
        for t in subsets(q - 1) {
            let prod: f64 = t.iter().map(|&j| cos[j] * cos[j]).product();
            for (i, &cos_i) in cos.iter().enumerate() {
                if t.contains(&i) {
                    continue;
                }
                beta_side += prod * cos_i * gp.z_i[(2 * i, 2 * i + 1)];
            }
        }
        beta_side *= -2.0;
    }

    // symmetric display with the odd-k extra term (needs k - 2q - 1 >= 0)
    let mut gamma_side = 0.0;
    if q >= 0 && 2 * q < k as i64 {
        for t in subsets(q) {
            let prod: f64 = t.iter().map(|&j| cos[j] * cos[j]).product();
            for i in 0..half {
                if t.contains(&i) {
                    continue;
                }
                gamma_side += prod * (gp.z_r[(2 * i, 2 * i)] + gp.z_r[(2 * i + 1, 2 * i + 1)]);
            }
            if k % 2 == 1 {
                gamma_side += prod * gp.z_r[(k - 1, k - 1)];
            }
        }
    }
    Ok((beta_side, gamma_side))
}

/// det_mixed routes for the two closed-form displays, for oracle comparison:
/// (det_k(I[2q-1], Z^I, R[k-2q]), det_k(I[2q], Z^R, R[k-2q-1])).
pub fn symbol_blocks_via_det(w: &VectorTuple, q: i64, z: &[f64]) -> Result<(f64, f64)> {
    let k = w.k() as i64;
    let gp = gram_pack(w, z);
    let beta_side = if q >= 1 && 2 * q <= k {
        let mut blocks = vec![(gp.z_i.clone(), 1usize)];
        if 2 * q - 1 > 0 {
            blocks.push((gp.i_w.clone(), (2 * q - 1) as usize));
        }
        if k - 2 * q > 0 {
            blocks.push((gp.r_w.clone(), (k - 2 * q) as usize));
        }
        det_mixed(&blocks)?
    } else {
        0.0
    };
    let gamma_side = if q >= 0 && 2 * q < k {
        let mut blocks = vec![(gp.z_r.clone(), 1usize)];
        if q > 0 {
            blocks.push((gp.i_w.clone(), (2 * q) as usize));
        }
        if k - 1 - 2 * q > 0 {
            blocks.push((gp.r_w.clone(), (k - 1 - 2 * q) as usize));
        }
        det_mixed(&blocks)?
    } else {
        0.0
    };
    Ok((beta_side, gamma_side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{extremal_subspace, random_subspace_with, tasaki_basis};
    use crate::mixed::times_i;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn e(n: usize, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; 2 * n];
        v[j] = 1.0;
        v
    }

    #[test]
    fn p2q_on_canonical_pairs() {
        let n = 2;
        let complex_pair = VectorTuple::new(n, vec![e(n, 0), times_i(&e(n, 0))]).unwrap();
        assert!((p_kq(&complex_pair, 1).unwrap() - 1.0).abs() < 1e-14);
        assert!(p_kq(&complex_pair, 0).unwrap().abs() < 1e-14);
        let real_pair = VectorTuple::new(n, vec![e(n, 0), e(n, 1)]).unwrap();
        assert!((p_kq(&real_pair, 0).unwrap() - 1.0).abs() < 1e-14);
        assert!(p_kq(&real_pair, 1).unwrap().abs() < 1e-14);
    }

    #[test]
    fn p2q_on_tilted_pair() {
        // w = (e_1, cos(0.3) i e_1 + sin(0.3) e_2): P_{2,1} = cos^2, P_{2,0} = sin^2.
        let n = 2;
        let t = 0.3f64;
        let mut w2 = times_i(&e(n, 0));
        for (a, b) in w2.iter_mut().zip(&e(n, 1)) {
            *a = t.cos() * *a + t.sin() * b;
        }
        let w = VectorTuple::new(n, vec![e(n, 0), w2]).unwrap();
        assert!((p_kq(&w, 1).unwrap() - t.cos().powi(2)).abs() < 1e-14);
        assert!((p_kq(&w, 0).unwrap() - t.sin().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn klain_delta_on_extremal_subspaces() {
        for n in 2..=3usize {
            for k in 1..=(2 * n).min(4) {
                for p in k.saturating_sub(n)..=(k / 2) {
                    if k - p > n {
                        continue;
                    }
                    let e_kp = extremal_subspace(n, k, p).unwrap();
                    for q in k.saturating_sub(n)..=(k / 2) {
                        let kl = klain_mu_kq(&e_kp, q as i64).unwrap();
                        let want = if p == q { 1.0 } else { 0.0 };
                        assert!((kl - want).abs() < 1e-12, "n={n} k={k} p={p} q={q}: {kl}");
                    }
                }
            }
        }
    }

    #[test]
    fn klain_combinatorial_identity_k4() {
        // k = 4, p = 2, q = 1: sum_j (-1)^{j-1} C(j,1) C(2,j) = 2 - 2 = 0,
        // checked by brute force over j.
        let mut brute = 0.0;
        for j in 1..=2i64 {
            let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
            brute += sign * binom(j, 1) * binom(2, j);
        }
        assert_eq!(brute, 0.0);
        let e42 = extremal_subspace(3, 4, 2).unwrap();
        assert!(klain_mu_kq(&e42, 1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn klain_totally_real_q0_is_one() {
        let e30 = extremal_subspace(3, 3, 0).unwrap();
        assert!((klain_mu_kq(&e30, 0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symbols_on_extremal_closed_forms() {
        // For w spanning E_{k,p}: both symbols vanish for q != p; for q = p,
        // beta = det * sum_{j<=q} |z_j|^2 and gamma = det * sum of squared real
        // parts along the totally real directions.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 2..=3usize {
            for k in 1..=(2 * n).min(5) {
                for p in k.saturating_sub(n)..=(k / 2) {
                    if k - p > n {
                        continue;
                    }
                    let e_kp = extremal_subspace(n, k, p).unwrap();
                    let vs: Vec<Vec<f64>> = (0..k)
                        .map(|_| {
                            let coeffs: Vec<f64> =
                                (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
                            e_kp.embed(&coeffs)
                        })
                        .collect();
                    let w = VectorTuple::new(n, vs).unwrap();
                    let gram = gram_pack(&w, &vec![0.0; 2 * n]);
                    let det_gram = gram.r_w.clone().lu().determinant();
                    let z: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    for q in 0..=(k as i64 / 2) {
                        let sb = symbol_beta(&w, q, &z).unwrap();
                        let sg = symbol_gamma(&w, q, &z).unwrap();
                        if q != p as i64 {
                            assert!(sb.abs() < 1e-10, "beta n={n} k={k} p={p} q={q}");
                            assert!(sg.abs() < 1e-10, "gamma n={n} k={k} p={p} q={q}");
                        } else {
                            let zsq: f64 =
                                (0..p).map(|j| z[j] * z[j] + z[n + j] * z[n + j]).sum();
                            let rsq: f64 = (p..k - p).map(|j| z[j] * z[j]).sum();
                            assert!(
                                (sb - det_gram * zsq).abs() < 1e-9 * (1.0 + det_gram.abs()),
                                "beta closed form n={n} k={k} q={q}: {sb} vs {}",
                                det_gram * zsq
                            );
                            assert!(
                                (sg - det_gram * rsq).abs() < 1e-9 * (1.0 + det_gram.abs()),
                                "gamma closed form n={n} k={k} q={q}: {sg} vs {}",
                                det_gram * rsq
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tasaki_closed_forms_match_det_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..100 {
            let n = if trial % 2 == 0 { 2 } else { 3 };
            let k = rng.gen_range(2..=2 * n);
            let s = random_subspace_with(n, k, &mut rng).unwrap();
            let w = tasaki_basis(&s).unwrap();
            let z: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for q in 0..=(k as i64 / 2) {
                let (beta_closed, gamma_closed) = tasaki_closed_forms(&w, q, &z).unwrap();
                let (beta_det, gamma_det) = symbol_blocks_via_det(&w, q, &z).unwrap();
                assert!(
                    (beta_closed - beta_det).abs() < 1e-10,
                    "beta n={n} k={k} q={q}: {beta_closed} vs {beta_det}"
                );
                assert!(
                    (gamma_closed - gamma_det).abs() < 1e-10,
                    "gamma n={n} k={k} q={q}: {gamma_closed} vs {gamma_det}"
                );
            }
        }
    }

    #[test]
    fn tasaki_closed_forms_reject_non_tasaki() {
        let n = 2;
        let z = vec![0.1, 0.2, 0.3, 0.4];
        // orthonormal but with a plainly wrong skew Gram structure: a complex
        // pair ordered (i e_1, e_1) has the +cos above the diagonal
        let bad_order = VectorTuple::new(n, vec![times_i(&e(n, 0)), e(n, 0)]).unwrap();
        assert!(tasaki_closed_forms(&bad_order, 1, &z).is_err());
        // non-orthonormal tuple
        let bad = VectorTuple::new(n, vec![e(n, 0), vec![0.5, 0.0, 0.0, 0.0]]).unwrap();
        assert!(tasaki_closed_forms(&bad, 1, &z).is_err());
    }

    #[test]
    fn all_angles_right_kills_beta_side() {
        // totally real subspace: every cos factor vanishes, so the skew-side
        // closed form is zero for q >= 1
        let s = extremal_subspace(3, 3, 0).unwrap();
        let w = tasaki_basis(&s).unwrap();
        let z = vec![0.3, -0.2, 0.5, 0.1, 0.0, 0.7];
        let (beta_side, _) = tasaki_closed_forms(&w, 1, &z).unwrap();
        assert_eq!(beta_side, 0.0);
    }

    #[test]
    fn odd_k_real_direction_reduces_to_zr_kk() {
        // k = 3 tuple, z along the odd Tasaki direction: the symmetric display
        // reduces to its Z^R_{k,k} term when q = floor(k/2).
        let n = 2;
        let s = extremal_subspace(n, 3, 1).unwrap();
        let w = tasaki_basis(&s).unwrap();
        let z = w.vectors()[2].clone();
        let (_, gamma_side) = tasaki_closed_forms(&w, 1, &z).unwrap();
        let gp = gram_pack(&w, &z);
        assert!((gamma_side - gp.z_r[(2, 2)]).abs() < 1e-14);
    }

    #[test]
    fn lemma_factorization_constant_quotient() {
        // P_{k,q}(w) / det(Re-Gram) is constant across tuples inside a fixed E.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for n in 2..=3usize {
            let k = 3.min(2 * n);
            let s = random_subspace_with(n, k, &mut rng).unwrap();
            for q in 0..=(k as i64 / 2) {
                let mut first: Option<f64> = None;
                for _ in 0..50 {
                    let vs: Vec<Vec<f64>> = (0..k)
                        .map(|_| {
                            let coeffs: Vec<f64> =
                                (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
                            s.embed(&coeffs)
                        })
                        .collect();
                    let w = VectorTuple::new(n, vs).unwrap();
                    let det_gram = gram_pack(&w, &vec![0.0; 2 * n]).r_w.lu().determinant();
                    if det_gram.abs() < 1e-4 {
                        continue;
                    }
                    let ratio = p_kq(&w, q).unwrap() / det_gram;
                    match first {
                        None => first = Some(ratio),
                        Some(f) => {
                            assert!((ratio - f).abs() < 1e-8 * (1.0 + f.abs()));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn prop_factorization_matches_klain() {
        // P_{k,q}(w) = det(Re-Gram) * Klain(E, q) on random subspace/tuple pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for trial in 0..100 {
            let n = if trial % 2 == 0 { 2 } else { 3 };
            let k = rng.gen_range(1..=(2 * n).min(4));
            let s = random_subspace_with(n, k, &mut rng).unwrap();
            let vs: Vec<Vec<f64>> = (0..k)
                .map(|_| {
                    let coeffs: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    s.embed(&coeffs)
                })
                .collect();
            let w = VectorTuple::new(n, vs).unwrap();
            let det_gram = gram_pack(&w, &vec![0.0; 2 * n]).r_w.lu().determinant();
            for q in 0..=(k as i64 / 2) {
                let lhs = p_kq(&w, q).unwrap();
                let rhs = det_gram * klain_mu_kq(&s, q).unwrap();
                assert!(
                    (lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()),
                    "n={n} k={k} q={q}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn vanishing_on_dependent_tuples() {
        let n = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let v1: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v2: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dep: Vec<f64> = v1
                .iter()
                .zip(&v2)
                .map(|(a, b)| 0.5 * a - 1.5 * b)
                .collect();
            let w = VectorTuple::new(n, vec![v1, v2, dep]).unwrap();
            let z: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for q in 0..=1i64 {
                assert!(p_kq(&w, q).unwrap().abs() < 1e-10);
                assert!(symbol_beta(&w, q, &z).unwrap().abs() < 1e-10);
                assert!(symbol_gamma(&w, q, &z).unwrap().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn unitary_equivariance_of_symbols() {
        let n = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = crate::grassmann::random_unitary_real(n, &mut rng);
        let rot = |v: &[f64]| -> Vec<f64> {
            (&u * nalgebra::DVector::from_column_slice(v))
                .as_slice()
                .to_vec()
        };
        for _ in 0..10 {
            let vs: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let z: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w = VectorTuple::new(n, vs.clone()).unwrap();
            let wu = VectorTuple::new(n, vs.iter().map(|v| rot(v)).collect()).unwrap();
            let zu = rot(&z);
            for q in 0..=1i64 {
                assert!((p_kq(&w, q).unwrap() - p_kq(&wu, q).unwrap()).abs() < 1e-12);
                assert!(
                    (symbol_beta(&w, q, &z).unwrap() - symbol_beta(&wu, q, &zu).unwrap()).abs()
                        < 1e-12
                );
                assert!(
                    (symbol_gamma(&w, q, &z).unwrap() - symbol_gamma(&wu, q, &zu).unwrap()).abs()
                        < 1e-12
                );
            }
        }
    }
}

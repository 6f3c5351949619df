//! Exact checks of the operator identities behind the solution spaces.

use num_rational::BigRational;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::random::{random_poly, random_symmetric_invertible};
use super::report::CheckReport;
use crate::error::{Error, Result};
use crate::linalg::{int_det, q_from_int, q_identity, q_inverse, q_mul, q_transpose, QMat};
use crate::polyalg::ops::{exp_weighted_laplace, inverse_form, ring_matrix};
use crate::polyalg::{
    euler_entry, exp_trace_laplace, homogeneity_degree, laplace_entry, trace_laplace,
    vigneras_apply, Coeff, ExactPoly, ExpQuadPoly, Ring,
};
use crate::quadform::QuadForm;

type Mat = Vec<Vec<Coeff>>;

/// 0 for equal polynomials, otherwise the largest coefficient of the difference (never 0).
pub fn exact_gap(a: &ExactPoly, b: &ExactPoly) -> f64 {
    if a == b {
        0.0
    } else {
        a.sub(b).max_coeff().max(f64::MIN_POSITIVE)
    }
}

fn coeff_matrix(a: &QMat) -> Mat {
    ring_matrix(a)
}

/// Largest violation of `E_ij(trΔ^k p) − trΔ^k(E_ij p) = −2k(Δ_A)_ij(trΔ^{k−1} p)`
/// over all entries and all `1 ≤ k' ≤ k`.
pub fn commutator_residual(p: &ExactPoly, ainv: &Mat, k: u32) -> Result<f64> {
    let (_, n) = p.shape();
    let mut worst: f64 = 0.0;
    let mut prev = p.clone();
    let mut euler_iter: Vec<ExactPoly> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            euler_iter.push(euler_entry(p, i, j)?);
        }
    }
    for kk in 1..=k {
        let cur = trace_laplace(&prev, ainv)?;
        let two_k = Coeff::from_int(-2 * kk as i64);
        for i in 0..n {
            for j in 0..n {
                let slot = &mut euler_iter[i * n + j];
                *slot = trace_laplace(slot, ainv)?;
                let lhs = euler_entry(&cur, i, j)?.sub(slot);
                let rhs = laplace_entry(&prev, ainv, i, j)?.scale(&two_k);
                worst = worst.max(exact_gap(&lhs, &rhs));
            }
        }
        prev = cur;
    }
    Ok(worst)
}

/// Commutator identity on `trials` random polynomials for each of `forms` random forms.
pub fn check_commutator(
    rng: &mut ChaCha8Rng,
    (m, n): (usize, usize),
    degree: u32,
    trials: usize,
    k: u32,
    forms: usize,
) -> Result<CheckReport> {
    let mut worst: f64 = 0.0;
    let mut count = 0usize;
    for _ in 0..forms {
        let a = random_symmetric_invertible(rng, m, 3);
        let ainv = inverse_form::<Coeff>(&q_from_int(&a))?;
        for _ in 0..trials {
            let p = random_poly(rng, m, n, degree, 6);
            worst = worst.max(commutator_residual(&p, &ainv, k)?);
            count += 1;
        }
    }
    Ok(CheckReport::new(
        "commutator",
        json!("E_ij trΔ^k p − trΔ^k E_ij p"),
        json!("−2k (Δ_A)_ij trΔ^{k−1} p"),
        worst,
        0.0,
    )
    .with("m", m)
    .with("n", n)
    .with("degree", degree)
    .with("k", k)
    .with("polynomials", count))
}

fn report(name: &str, gap: f64) -> CheckReport {
    CheckReport::new(name, json!(name), json!(name), gap, 0.0)
}

/// The four operator-exponential rules, checked exactly on `p`.
///
/// `nmat` (`n×n`) and `mmat` (`m×m`) are the linear substitutions of rules 3 and 4.
pub fn check_exp_rules(p: &ExactPoly, a: &QMat, nmat: &[Vec<i64>], mmat: &[Vec<i64>]) -> Result<Vec<CheckReport>> {
    let (m, n) = p.shape();
    let ainv_q = q_inverse(a)?;
    let ainv = coeff_matrix(&ainv_q);
    let ca = Coeff::ratio_pi(1, 3, -1);
    let cb = Coeff::ratio_pi(-1, 8, -1);
    let c = Coeff::ratio_pi(1, 4, -1);
    let mut out = Vec::new();

    let lhs = exp_trace_laplace(&exp_trace_laplace(p, &ainv, &cb)?, &ainv, &ca)?;
    let rhs = exp_trace_laplace(p, &ainv, &ca.add(&cb))?;
    out.push(report("exp_rule_group", exact_gap(&lhs, &rhs)));

    let scale = BigRational::new(3.into(), 2.into());
    let sl: Mat = coeff_matrix(&q_identity(m).iter().map(|r| r.iter().map(|x| x * &scale).collect()).collect());
    let id_n = coeff_matrix(&q_identity(n));
    let id_m = coeff_matrix(&q_identity(m));
    let lhs = exp_trace_laplace(&p.substitute_linear(&sl, &id_n)?, &ainv, &c)?;
    let c2 = c.mul(&Coeff::rational(&scale * &scale));
    let rhs = exp_trace_laplace(p, &ainv, &c2)?.substitute_linear(&sl, &id_n)?;
    out.push(report("exp_rule_scalar", exact_gap(&lhs, &rhs)));

    let nq = q_from_int(nmat);
    let nc = coeff_matrix(&nq);
    let ntn = coeff_matrix(&q_mul(&q_transpose(&nq), &nq));
    let lhs = exp_trace_laplace(&p.substitute_linear(&id_m, &nc)?, &ainv, &c)?;
    let rhs = exp_weighted_laplace(p, &ainv, &ntn, &c)?.substitute_linear(&id_m, &nc)?;
    out.push(report("exp_rule_right", exact_gap(&lhs, &rhs)));

    let mq = q_from_int(mmat);
    let mc = coeff_matrix(&mq);
    let ginv = coeff_matrix(&q_mul(&q_mul(&mq, &ainv_q), &q_transpose(&mq)));
    let lhs = exp_trace_laplace(&p.substitute_linear(&mc, &id_n)?, &ainv, &c)?;
    let rhs = exp_weighted_laplace(p, &ginv, &id_n, &c)?.substitute_linear(&mc, &id_n)?;
    out.push(report("exp_rule_left", exact_gap(&lhs, &rhs)));
    Ok(out)
}

/// `P(UN) = det N^α P(U)` for an integral `N`, together with `E P = αIP`.
pub fn check_homogeneity(p: &ExactPoly, nmat: &[Vec<i64>], alpha: u32) -> Result<CheckReport> {
    let (m, _) = p.shape();
    let d = Coeff::rational(BigRational::from_integer(int_det(nmat)));
    let det = (0..alpha).fold(Coeff::one(), |acc, _| acc.mul(&d));
    let lhs = p.substitute_linear(&coeff_matrix(&q_identity(m)), &coeff_matrix(&q_from_int(nmat)))?;
    let gap = exact_gap(&lhs, &p.scale(&det));
    let euler = homogeneity_degree(p);
    let residual = if euler == Some(alpha) { gap } else { gap.max(1.0) };
    Ok(report("maass_homogeneity", residual).with("alpha", alpha).with("euler_degree", json!(euler)))
}

/// `f = exp(−trΔ_A/8π)P` solves `𝒟_A f = αIf` and `exp(trΔ_A/8π)f` returns `P` with `E P = αIP`.
///
/// Metadata records the two eigen-residuals separately so that a failure on both
/// sides (the equivalence) can be observed for non-homogeneous `P`.
pub fn check_lift_equivalence(p: &ExactPoly, form: &QuadForm, alpha: u32) -> Result<CheckReport> {
    let ainv = inverse_form::<Coeff>(&form.to_q())?;
    let eighth = Coeff::ratio_pi(-1, 8, -1);
    let f = exp_trace_laplace(p, &ainv, &eighth)?;
    let lam = Coeff::from_int(alpha as i64);
    let vig = vigneras_apply(&f, &ainv)?.residual(&f, &lam);
    let back = exp_trace_laplace(&f, &ainv, &eighth.neg())?;
    let round = exact_gap(&back, p);
    let (_, n) = p.shape();
    let mut euler: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let e = euler_entry(&back, i, j)?;
            let target = if i == j { back.scale(&lam) } else { ExactPoly::zero(p.rows(), n) };
            euler = euler.max(exact_gap(&e, &target));
        }
    }
    Ok(report("lift_equivalence", vig.max(round).max(euler))
        .with("vigneras_residual", vig)
        .with("euler_residual", euler)
        .with("round_trip", round))
}

/// `f_P = exp(−trΔ/8π)P · exp(−2π tr(UᵀU))` solves `𝒟_{−I} f = −(β+m)If`.
pub fn check_negative_solution(p: &ExactPoly, beta: u32) -> Result<CheckReport> {
    let (m, n) = p.shape();
    let id = coeff_matrix(&q_identity(m));
    let neg_id: Mat = id.iter().map(|r| r.iter().map(|c| c.neg()).collect()).collect();
    let poly = exp_trace_laplace(p, &id, &Coeff::ratio_pi(-1, 8, -1))?;
    let two_pi = Coeff::ratio_pi(-2, 1, 1);
    let b: Mat = (0..m).map(|i| (0..m).map(|j| if i == j { two_pi.clone() } else { Coeff::zero() }).collect()).collect();
    let f = ExpQuadPoly::new(poly, b)?;
    let lam = Coeff::from_int(-((beta as usize + m) as i64));
    let res = vigneras_apply(&f, &neg_id)?.residual(&f, &lam);
    Ok(report("negative_solution", res).with("beta", beta).with("m", m).with("n", n))
}

/// `(Δ_A)_ij(p[S⁻¹]) = ((Δ_𝓘)_ij p)[S⁻¹]` and the same for `E_ij`, where `A = S⁻ᵀ𝓘S⁻¹`.
pub fn check_transfer(p: &ExactPoly, sinv: &QMat, signs: &[i64]) -> Result<CheckReport> {
    let (m, n) = p.shape();
    if sinv.len() != m || signs.len() != m {
        return Err(Error::Shape(format!("S⁻¹ and the signs must have size {m}")));
    }
    let mut iq = q_identity(m);
    for (i, &s) in signs.iter().enumerate() {
        iq[i][i] = BigRational::from_integer(s.into());
    }
    let a = q_mul(&q_mul(&q_transpose(sinv), &iq), sinv);
    let ainv = inverse_form::<Coeff>(&a)?;
    let iinv = coeff_matrix(&iq);
    let sc = coeff_matrix(sinv);
    let id_n = coeff_matrix(&q_identity(n));
    let moved = p.substitute_linear(&sc, &id_n)?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let l = laplace_entry(&moved, &ainv, i, j)?;
            let r = laplace_entry(p, &iinv, i, j)?.substitute_linear(&sc, &id_n)?;
            worst = worst.max(exact_gap(&l, &r));
            let l = euler_entry(&moved, i, j)?;
            let r = euler_entry(p, i, j)?.substitute_linear(&sc, &id_n)?;
            worst = worst.max(exact_gap(&l, &r));
        }
    }
    Ok(report("sylvester_transfer", worst))
}

/// `(Δ_A)_ij p = (Δ_A)_ji p`.
pub fn check_laplace_symmetry(p: &ExactPoly, a: &QMat) -> Result<CheckReport> {
    let ainv = inverse_form::<Coeff>(a)?;
    let (_, n) = p.shape();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max(exact_gap(&laplace_entry(p, &ainv, i, j)?, &laplace_entry(p, &ainv, j, i)?));
        }
    }
    Ok(report("laplace_symmetry", worst))
}

//! The two generator laws of the theta series and the eigen-equation check.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::json;

use super::report::{relative_residual, CheckReport};
use crate::error::{Error, Result};
use crate::linalg::{q_from_int, q_inverse, q_mul, q_transpose, q_zeros, qint, QMat};
use crate::polyalg::coeff::rational_to_f64;
use crate::quadform::{coset_reps, QuadForm};
use crate::siegel::{det_power, SiegelPoint};
use crate::theta::spec::{vigneras_residual, IndefFn, ThetaCoeff, FLOAT_PDE_TOL};
use crate::theta::{theta_eval, ThetaSpec};

pub const TRANSLATION_TOL: f64 = 1e-10;
pub const INVERSION_TOL: f64 = 1e-8;

/// `e(x) = exp(2πix)` with `x` reduced modulo 1 in exact arithmetic first.
pub fn e_rational(x: &BigRational) -> Complex64 {
    let frac = x - x.floor();
    Complex64::new(0.0, 2.0 * PI * rational_to_f64(&frac)).exp()
}

fn trace(x: &QMat) -> BigRational {
    (0..x.len()).map(|i| x[i][i].clone()).sum()
}

/// Phase and shifted `K̃` of the translation law for an integral symmetric `S`.
pub fn translation_data(spec: &ThetaSpec, s: &[Vec<i64>]) -> Result<(BigRational, QMat)> {
    let (m, n) = spec.shape();
    if s.len() != n || s.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("S must be {n}×{n}")));
    }
    if (0..n).any(|i| (0..i).any(|j| s[i][j] != s[j][i])) {
        return Err(Error::NotSymmetric("translation S".into()));
    }
    let a = spec.form().to_q();
    let sq = q_from_int(s);
    let h = spec.h();
    let hta = q_mul(&q_transpose(h), &a);
    let mut phase = -trace(&q_mul(&q_mul(&hta, h), &sq)) / qint(2);
    // A₀1S₀ has entries A_μμ S_νν
    let mut a1s = q_zeros(m, n);
    for mu in 0..m {
        for nu in 0..n {
            let c = qint(spec.form().entry(mu, mu) * s[nu][nu]);
            phase -= &c * &h[mu][nu] / qint(2);
            a1s[mu][nu] = c;
        }
    }
    let shift = q_mul(&q_inverse(&a)?, &a1s);
    let hs = q_mul(h, &sq);
    let k = spec.k();
    let kt = (0..m)
        .map(|mu| (0..n).map(|nu| &k[mu][nu] + &hs[mu][nu] + &shift[mu][nu] / qint(2)).collect())
        .collect();
    Ok((phase, kt))
}

/// `θ_{H,K}(Z+S)` against `e(−tr(HᵀAHS)/2 − tr(S₀1A₀H)/2)·θ_{H,K̃}(Z)`; absolute residual.
pub fn check_translation(spec: &ThetaSpec, z: &SiegelPoint, s: &[Vec<i64>], eps: f64) -> Result<CheckReport> {
    let (phase, kt) = translation_data(spec, s)?;
    let zs = z.translate(&crate::linalg::int_to_f64(s))?;
    let lhs = theta_eval(spec, &zs, eps)?;
    let shifted = spec.with_characteristics(spec.h().clone(), kt)?;
    let base = theta_eval(&shifted, z, eps)?;
    let rhs = e_rational(&phase) * base.value;
    let residual = (lhs.value - rhs).norm();
    Ok(CheckReport::complex("translation", lhs.value, rhs, residual, TRANSLATION_TOL)
        .with("eps", eps)
        .with("radius", lhs.radius.max(base.radius))
        .with("terms", lhs.terms_used + base.terms_used)
        .with("S", json!(s)))
}

/// Scalar prefactor of the inversion law, without the character `e(tr(HᵀAK))`.
pub fn inversion_prefactor(spec: &ThetaSpec, z: &SiegelPoint) -> Result<Complex64> {
    let (m, n) = spec.shape();
    let (r, s) = spec.dec().signature();
    let (alpha, beta) = spec.coeff().degrees();
    let (alpha, beta) = (alpha as f64, beta as f64);
    let (n_f, s_f) = (n as f64, s as f64);
    // i^{−mn/2} and (−1)^{(s/2+β)n+βs} through z^r = exp(r log z)
    let i_pow = Complex64::new(0.0, -PI * (m * n) as f64 / 4.0).exp();
    let sign = Complex64::new(0.0, PI * ((s_f / 2.0 + beta) * n_f + beta * s_f)).exp();
    let det_a = rational_to_f64(&BigRational::from_integer(spec.form().det().clone())).abs();
    let rho = (r as f64 - s_f) / 2.0 + alpha - beta;
    let dz = det_power(&z.z(), rho)?;
    Ok(i_pow * sign * det_a.powf(-n_f / 2.0) * dz)
}

/// `θ_{H,K}(−Z⁻¹)` against the coset expansion in `θ_{J+K,−H}(Z)`.
///
/// Residual is `|lhs − rhs| / max(|lhs|, |rhs|, 1)`.
pub fn check_inversion(spec: &ThetaSpec, z: &SiegelPoint, eps: f64) -> Result<CheckReport> {
    let (m, n) = spec.shape();
    let zi = z.neg_inverse()?;
    let lhs = theta_eval(spec, &zi, eps)?;
    let cosets = coset_reps(spec.form(), n)?;
    let neg_h: QMat = spec.h().iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut terms = lhs.terms_used;
    let mut radius = lhs.radius;
    for c in &cosets {
        let jk: QMat = (0..m).map(|a| (0..n).map(|i| &c.j[a][i] + &spec.k()[a][i]).collect()).collect();
        let t = theta_eval(&spec.with_characteristics(jk, neg_h.clone())?, z, eps)?;
        sum += t.value;
        terms += t.terms_used;
        radius = radius.max(t.radius);
    }
    let character = trace(&q_mul(&q_mul(&q_transpose(spec.h()), &spec.form().to_q()), spec.k()));
    let rhs = inversion_prefactor(spec, z)? * e_rational(&character) * sum;
    let residual = relative_residual(lhs.value, rhs);
    Ok(CheckReport::complex("inversion", lhs.value, rhs, residual, INVERSION_TOL)
        .with("eps", eps)
        .with("radius", radius)
        .with("terms", terms)
        .with("cosets", cosets.len()))
}

/// Eigen-equation residual: exact zero required for exact coefficients.
pub fn check_vigneras(coeff: &ThetaCoeff, form: &QuadForm, lambda: i64) -> Result<CheckReport> {
    let residual = vigneras_residual(coeff, form, lambda)?;
    let float = matches!(coeff, ThetaCoeff::Indef { g: IndefFn::Float(_), .. });
    let tol = if float { FLOAT_PDE_TOL } else { 0.0 };
    let (alpha, beta) = coeff.degrees();
    Ok(CheckReport::new("vigneras", json!("D_A f"), json!(format!("{lambda}·I·f")), residual, tol)
        .with("alpha", alpha)
        .with("beta", beta)
        .with("lambda", lambda)
        .with("mode", if float { "float" } else { "exact" }))
}

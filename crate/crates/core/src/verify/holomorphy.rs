//! Finite-difference check that `∂θ/∂Z̄` vanishes for harmonic coefficients.

use num_complex::Complex64;
use serde_json::json;

use super::report::CheckReport;
use crate::error::{Error, Result};
use crate::polyalg::{Coeff, ExactPoly, GaussRat};
use crate::linalg::qint;
use crate::quadform::QuadForm;
use crate::siegel::SiegelPoint;
use crate::theta::{theta_eval, ThetaSpec};

pub const HOLOMORPHY_TOL: f64 = 1e-6;
pub const FD_STEP: f64 = 1e-3;

/// `(xᵀAu)²` with `x = e_a + i·e_b`; harmonic when `A_aa = A_bb` and `A_ab = 0`.
pub fn isotropic_square(form: &QuadForm, a: usize, b: usize) -> Result<ExactPoly> {
    let m = form.dim();
    if a >= m || b >= m || a == b {
        return Err(Error::Index(format!("isotropic pair ({a},{b}) for dimension {m}")));
    }
    let mut lin = ExactPoly::zero(m, 1);
    for k in 0..m {
        let c = GaussRat::new(qint(form.entry(a, k)), qint(form.entry(b, k)));
        if !c.is_zero() {
            let mut e = vec![0; m];
            e[k] = 1;
            lin.add_term(e, Coeff::monomial(c, 0));
        }
    }
    Ok(lin.mul(&lin))
}

/// Fourth-order central difference of `t ↦ g(t)` at 0.
fn derivative(g: impl Fn(f64) -> Result<Complex64>, h: f64) -> Result<Complex64> {
    Ok((g(-2.0 * h)? - g(-h)? * 8.0 + g(h)? * 8.0 - g(2.0 * h)?) / (12.0 * h))
}

/// Largest `|∂θ/∂Z̄_ij|` over the entries, estimated with step `h`.
///
/// Residual is relative to `max(|θ(Z)|, 1)`.
pub fn check_holomorphy(spec: &ThetaSpec, z: &SiegelPoint, h: f64, eps: f64) -> Result<CheckReport> {
    let n = z.genus();
    let value = theta_eval(spec, z, eps)?.value;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let shift = |t: f64, imag: bool| -> Result<Complex64> {
                let mut x = z.x().clone();
                let mut y = z.y().clone();
                let target = if imag { &mut y } else { &mut x };
                target[(i, j)] += t;
                if i != j {
                    target[(j, i)] += t;
                }
                Ok(theta_eval(spec, &SiegelPoint::new(x, y)?, eps)?.value)
            };
            let dx = derivative(|t| shift(t, false), h)?;
            let dy = derivative(|t| shift(t, true), h)?;
            let dbar = (dx + Complex64::new(0.0, 1.0) * dy) * 0.5;
            worst = worst.max(dbar.norm());
        }
    }
    let residual = worst / value.norm().max(1.0);
    Ok(CheckReport::new("holomorphy", json!("dθ/dZ̄"), json!(0.0), residual, HOLOMORPHY_TOL)
        .with("theta", json!([value.re, value.im]))
        .with("step", h)
        .with("eps", eps))
}

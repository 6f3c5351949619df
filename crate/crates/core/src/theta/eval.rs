//! Truncated evaluation of `θ_{H,K,f,A}(Z)` and the Borcherds-form sum.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spec::ThetaSpec;
use super::sum::{lattice_sum, LatticeSum, TailModel};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, trace_gram};
use crate::polyalg::ops::exp_weighted_laplace;
use crate::polyalg::{FloatPoly, PolyEvaluator, Ring};
use crate::siegel::{sqrt_posdef, SiegelPoint};

/// A truncated theta value with its certified tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms_used: u64,
    pub radius: f64,
}

impl From<LatticeSum> for ThetaValue {
    fn from(s: LatticeSum) -> Self {
        ThetaValue { value: s.value, tail_bound: s.tail_bound, terms_used: s.terms_used, radius: s.radius }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ThetaValueJson {
    pub value: [f64; 2],
    pub tail_bound: f64,
    pub terms_used: u64,
    pub radius: f64,
}

impl ThetaValue {
    pub fn to_json(&self) -> ThetaValueJson {
        ThetaValueJson {
            value: [self.value.re, self.value.im],
            tail_bound: self.tail_bound,
            terms_used: self.terms_used,
            radius: self.radius,
        }
    }
}

fn row_major(x: &DMatrix<f64>) -> Vec<f64> {
    (0..x.nrows()).flat_map(|i| (0..x.ncols()).map(move |j| x[(i, j)])).collect()
}

/// Shared per-point geometry.
struct Frame {
    m: usize,
    n: usize,
    h: Vec<f64>,
    k: Vec<f64>,
    a: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Frame {
    fn new(spec: &ThetaSpec, z: &SiegelPoint) -> Result<Self> {
        let (m, n) = spec.shape();
        if z.genus() != n {
            return Err(Error::Shape(format!("Z has genus {}, coefficient has {n} columns", z.genus())));
        }
        Ok(Frame {
            m,
            n,
            h: row_major(&spec.h_f64()),
            k: row_major(&spec.k_f64()),
            a: row_major(&spec.dec().a()),
            x: row_major(z.x()),
            y: row_major(z.y()),
        })
    }

    /// `U = H + v` (row-major) from the column-stacked lattice vector.
    fn point(&self, v: &[i64]) -> Vec<f64> {
        let (m, n) = (self.m, self.n);
        let mut u = vec![0.0; m * n];
        for a in 0..m {
            for i in 0..n {
                u[a * n + i] = self.h[a * n + i] + v[a + m * i] as f64;
            }
        }
        u
    }

    /// `G·U` for a row-major `m×m` matrix `G`.
    fn left(&self, g: &[f64], u: &[f64]) -> Vec<f64> {
        let (m, n) = (self.m, self.n);
        let mut out = vec![0.0; m * n];
        for a in 0..m {
            for b in 0..m {
                let gab = g[a * m + b];
                if gab != 0.0 {
                    for i in 0..n {
                        out[a * n + i] += gab * u[b * n + i];
                    }
                }
            }
        }
        out
    }

    /// `tr(Uᵀ·GU·W)` for `GU` already multiplied and symmetric `W`.
    fn trace_with(&self, u: &[f64], gu: &[f64], w: &[f64]) -> f64 {
        let (m, n) = (self.m, self.n);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let wji = w[j * n + i];
                if wji == 0.0 {
                    continue;
                }
                let mut s = 0.0;
                for a in 0..m {
                    s += u[a * n + i] * gu[a * n + j];
                }
                acc += s * wji;
            }
        }
        acc
    }

    /// `tr(KᵀAU)` given `AU`.
    fn k_pairing(&self, au: &[f64]) -> f64 {
        self.k.iter().zip(au).map(|(k, x)| k * x).sum()
    }

    fn gram_and_center(&self, majorant: &DMatrix<f64>, y: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
        let (m, n) = (self.m, self.n);
        let center = (0..m * n).map(|r| self.h[(r % m) * n + r / m]).collect();
        (trace_gram(majorant, y), center)
    }
}

/// `θ_{H,K,f,A}(Z) = det Y^{−λ/2} Σ_{U∈H+ℤ^{m×n}} f(UY^{1/2}) e(tr(UᵀAUZ)/2 + tr(KᵀAU))`,
/// truncated so the tail bound is below `eps`.
pub fn theta_eval(spec: &ThetaSpec, z: &SiegelPoint, eps: f64) -> Result<ThetaValue> {
    let fr = Frame::new(spec, z)?;
    let (m, n) = (fr.m, fr.n);
    let ys = sqrt_posdef(z.y())?;
    let ys_flat = row_major(&ys);
    let det_y = z.y().determinant();
    let scale = det_y.powf(-(spec.lambda() as f64) / 2.0);
    let g = match spec.coeff() {
        super::spec::ThetaCoeff::Poly { p, .. } => crate::polyalg::ExpQuadPoly::new(p.to_float(), vec![vec![Complex64::new(0.0, 0.0); m]; m])?,
        super::spec::ThetaCoeff::Indef { g, .. } => g.to_float(),
    };
    let poly = g.poly().clone();
    let b: Vec<f64> = g.exponent().iter().flat_map(|r| r.iter().map(|c| c.re)).collect();
    let eval = PolyEvaluator::new(&poly);
    let majorant = spec.dec().majorant().clone();
    let model = TailModel {
        scale,
        c_poly: poly.coeff_norm(),
        kappa: 1.0 / min_eigenvalue(&majorant),
        degree: poly.degree(),
    };
    let (gram, center) = fr.gram_and_center(&majorant, z.y());
    let s = lattice_sum(&gram, &center, &model, eps, |v| {
        let u = fr.point(v);
        let mut w = vec![0.0; m * n];
        for a in 0..m {
            for j in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += u[a * n + i] * ys_flat[i * n + j];
                }
                w[a * n + j] = acc;
            }
        }
        let bw = fr.left(&b, &w);
        let gauss: f64 = w.iter().zip(&bw).map(|(x, y)| x * y).sum();
        let au = fr.left(&fr.a, &u);
        let re = gauss - PI * fr.trace_with(&u, &au, &fr.y);
        let im = PI * fr.trace_with(&u, &au, &fr.x) + 2.0 * PI * fr.k_pairing(&au);
        eval.eval_real(&w) * Complex64::new(re, im).exp() * scale
    })?;
    Ok(s.into())
}

/// `det Y^{s/2+β}`, the factor relating the two evaluation paths.
pub fn borcherds_normalization(spec: &ThetaSpec, z: &SiegelPoint) -> f64 {
    let (_, s) = spec.dec().signature();
    let (_, beta) = spec.coeff().degrees();
    z.y().determinant().powf(s as f64 / 2.0 + beta as f64)
}

/// `P_Y = exp(−tr(Δ_M Y⁻¹)/8π)P` with `P = exp(trΔ_M/8π)` of the coefficient's polynomial part.
pub fn borcherds_poly(spec: &ThetaSpec, z: &SiegelPoint) -> Result<FloatPoly> {
    let n = spec.genus();
    let cplx = |x: &DMatrix<f64>| -> Vec<Vec<Complex64>> {
        (0..x.nrows()).map(|i| (0..x.ncols()).map(|j| Complex64::new(x[(i, j)], 0.0)).collect()).collect()
    };
    let minv = match spec.dec().exact() {
        Some(ex) => cplx(&crate::linalg::q_to_f64(&ex.majorant_inv)),
        None => cplx(
            &spec
                .dec()
                .majorant()
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Numerical("majorant is not invertible".into()))?,
        ),
    };
    let id = cplx(&DMatrix::identity(n, n));
    let yinv = cplx(&z.y().clone().try_inverse().ok_or_else(|| Error::Singular("Y".into()))?);
    let eighth = Complex64::new(1.0 / (8.0 * PI), 0.0);
    let p_big = exp_weighted_laplace(&spec.coeff().poly_part(), &minv, &id, &eighth)?;
    exp_weighted_laplace(&p_big, &minv, &yinv, &eighth.neg())
}

/// `Σ_{U∈H+ℤ^{m×n}} P_Y(U) e(tr(UᵀA⁺UZ)/2 + tr(UᵀA⁻UZ̄)/2 + tr(KᵀAU))`.
///
/// Multiplying by [`borcherds_normalization`] gives [`theta_eval`]'s value.
pub fn theta_eval_borcherds(spec: &ThetaSpec, z: &SiegelPoint, eps: f64) -> Result<ThetaValue> {
    let fr = Frame::new(spec, z)?;
    let poly = borcherds_poly(spec, z)?;
    let eval = PolyEvaluator::new(&poly);
    let ap = row_major(spec.dec().aplus());
    let am = row_major(spec.dec().aminus());
    let majorant = spec.dec().majorant().clone();
    let model = TailModel {
        scale: 1.0,
        c_poly: poly.coeff_norm(),
        kappa: 1.0 / (min_eigenvalue(&majorant) * min_eigenvalue(z.y())),
        degree: poly.degree(),
    };
    let (gram, center) = fr.gram_and_center(&majorant, z.y());
    let s = lattice_sum(&gram, &center, &model, eps, |v| {
        let u = fr.point(v);
        let apu = fr.left(&ap, &u);
        let amu = fr.left(&am, &u);
        let au = fr.left(&fr.a, &u);
        let re = -PI * fr.trace_with(&u, &apu, &fr.y) + PI * fr.trace_with(&u, &amu, &fr.y);
        let im = PI * (fr.trace_with(&u, &apu, &fr.x) + fr.trace_with(&u, &amu, &fr.x)) + 2.0 * PI * fr.k_pairing(&au);
        eval.eval_real(&u) * Complex64::new(re, im).exp()
    })?;
    Ok(s.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, q_zeros};
    use crate::polyalg::ExactPoly;
    use crate::quadform::QuadForm;
    use crate::theta::spec::{indef_spec, posdef_spec};

    fn jacobi(y: f64, shift: f64) -> f64 {
        (-60i64..=60).map(|u| (-PI * y * (u as f64 + shift).powi(2)).exp()).sum()
    }

    #[test]
    fn one_dimensional_two() {
        let f = QuadForm::from_name("diag:2").unwrap();
        let spec = posdef_spec(&f, &ExactPoly::one(1, 1), q_zeros(1, 1), q_zeros(1, 1)).unwrap();
        let v = theta_eval(&spec, &SiegelPoint::i_identity(1), 1e-14).unwrap();
        assert!((v.value.re - jacobi(2.0, 0.0)).abs() < 1e-13);
        assert!((v.value.re - 1.0037348).abs() < 1e-7);
        assert!(v.value.im.abs() < 1e-15);
        assert!(v.tail_bound < 1e-14);
    }

    #[test]
    fn split_form_at_i_and_2i() {
        let f = QuadForm::from_name("diag:2,-2").unwrap();
        let one = ExactPoly::one(2, 1);
        let spec = indef_spec(&f, &one, &one, q_zeros(2, 1), q_zeros(2, 1)).unwrap();
        let z = SiegelPoint::i_identity(1);
        let v = theta_eval(&spec, &z, 1e-14).unwrap();
        let direct = jacobi(2.0, 0.0).powi(2);
        assert!((v.value.re - direct).abs() < 1e-13);
        assert!((v.value.re - 1.00748372).abs() < 1e-8);
        let b = theta_eval_borcherds(&spec, &z, 1e-14).unwrap();
        assert!((b.value - v.value).norm() < 1e-13);
        let z2 = SiegelPoint::scalar(0.0, 2.0).unwrap();
        let v2 = theta_eval(&spec, &z2, 1e-14).unwrap();
        let b2 = theta_eval_borcherds(&spec, &z2, 1e-14).unwrap();
        assert!((v2.value / b2.value - Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!((borcherds_normalization(&spec, &z2) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn half_characteristic() {
        let f = QuadForm::from_name("diag:2").unwrap();
        let spec = posdef_spec(&f, &ExactPoly::one(1, 1), vec![vec![q(1, 2)]], q_zeros(1, 1)).unwrap();
        let v = theta_eval(&spec, &SiegelPoint::i_identity(1), 1e-14).unwrap();
        assert!((v.value.re - jacobi(2.0, 0.5)).abs() < 1e-13);
    }

    #[test]
    fn genus_mismatch() {
        let f = QuadForm::from_name("diag:2").unwrap();
        let spec = posdef_spec(&f, &ExactPoly::one(1, 1), q_zeros(1, 1), q_zeros(1, 1)).unwrap();
        assert!(theta_eval(&spec, &SiegelPoint::i_identity(2), 1e-10).is_err());
    }
}

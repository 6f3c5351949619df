//! Quadrature checks of the Fourier transform identities, the Gauss transform
//! and Poisson summation, all for `m·n ≤ 2`.

use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::report::CheckReport;
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, q_to_f64, to_complex, trace_gram};
use crate::polyalg::ops::{exp_weighted_laplace, inverse_form};
use crate::polyalg::{ExactPoly, FloatPoly, PolyEvaluator};
use crate::quadform::QuadForm;
use crate::siegel::{det_power, SiegelPoint};
use crate::theta::sum::{lattice_sum, TailModel};
use crate::theta::{borcherds_poly, theta_eval_borcherds, ThetaSpec};

pub const FOURIER_TOL: f64 = 1e-6;
pub const GAUSS_TOL: f64 = 1e-8;
pub const POISSON_TOL: f64 = 1e-8;

const GL_ORDER: usize = 16;
const CONVERGED: f64 = 1e-10;

/// Composite Gauss–Legendre on `[−L, L]^dim` (`dim ≤ 2`), doubling the panel
/// count until two estimates agree. Returns the finer estimate and the difference.
pub fn integrate_box(dim: usize, l: f64, f: impl Fn(&[f64]) -> Complex64 + Sync) -> Result<(Complex64, f64)> {
    if !(1..=2).contains(&dim) {
        return Err(Error::Invalid(format!("quadrature supports 1 or 2 variables, got {dim}")));
    }
    let rule = GaussLegendre::new(GL_ORDER).map_err(|e| Error::Numerical(e.to_string()))?;
    let pairs = rule.as_node_weight_pairs().to_vec();
    let nodes = |panels: usize| -> Vec<(f64, f64)> {
        let h = 2.0 * l / panels as f64;
        (0..panels)
            .flat_map(|p| {
                let mid = -l + h * (p as f64 + 0.5);
                pairs.iter().map(move |(x, w)| (mid + 0.5 * h * x, 0.5 * h * w))
            })
            .collect()
    };
    let estimate = |panels: usize| -> Complex64 {
        let xs = nodes(panels);
        if dim == 1 {
            xs.iter().map(|(x, w)| f(&[*x]) * *w).sum()
        } else {
            xs.par_iter()
                .map(|(x, wx)| xs.iter().map(|(y, wy)| f(&[*x, *y]) * *wy).sum::<Complex64>() * *wx)
                .sum()
        }
    };
    let cap = if dim == 1 { 4096 } else { 512 };
    let mut panels = 4;
    let mut prev = estimate(panels);
    while panels < cap {
        panels *= 2;
        let cur = estimate(panels);
        let diff = (cur - prev).norm();
        if diff <= CONVERGED * cur.norm().max(1.0) {
            return Ok((cur, diff));
        }
        prev = cur;
    }
    Err(Error::Numerical(format!("quadrature did not converge with {panels} panels per axis")))
}

/// Half-width `L` with `c(1+L²)^{d/2} e^{−πμL²} ≤ 10⁻¹⁸`.
pub fn box_half_width(c: f64, degree: u32, mu: f64) -> f64 {
    let mut l: f64 = 1.0;
    let bound = |l: f64| c.max(1.0) * (1.0 + l * l).powf(degree as f64 / 2.0) * (-PI * mu * l * l).exp();
    while bound(l) > 1e-18 {
        l *= 1.25;
    }
    l
}

fn complex_rows(x: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..x.nrows()).map(|i| (0..x.ncols()).map(|j| x[(i, j)]).collect()).collect()
}

fn row_major_matrix(m: usize, n: usize, u: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(m, n, u)
}

/// `tr(VᵀAU)` for row-major `U`, `V`.
fn pairing(a: &DMatrix<f64>, v: &DMatrix<f64>, u: &DMatrix<f64>) -> f64 {
    (v.transpose() * a * u).trace()
}

/// `f_Z(U) = P_Y(U) e(tr(UᵀA⁺UZ)/2 + tr(UᵀA⁻UZ̄)/2)` for a coefficient with its
/// characteristics ignored. Equals `g_Z` of the indefinite case and `f_Z` of the definite one.
pub struct FzFunction {
    m: usize,
    n: usize,
    eval: PolyEvaluator,
    poly: FloatPoly,
    ap: DMatrix<f64>,
    am: DMatrix<f64>,
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl FzFunction {
    pub fn new(spec: &ThetaSpec, z: &SiegelPoint) -> Result<Self> {
        let (m, n) = spec.shape();
        if z.genus() != n {
            return Err(Error::Shape(format!("Z has genus {}, coefficient has {n} columns", z.genus())));
        }
        let poly = borcherds_poly(spec, z)?;
        Ok(FzFunction {
            m,
            n,
            eval: PolyEvaluator::new(&poly),
            poly,
            ap: spec.dec().aplus().clone(),
            am: spec.dec().aminus().clone(),
            x: z.x().clone(),
            y: z.y().clone(),
        })
    }

    pub fn poly(&self) -> &FloatPoly {
        &self.poly
    }

    /// Value at a row-major `m×n` point.
    pub fn eval(&self, u: &[f64]) -> Complex64 {
        let um = row_major_matrix(self.m, self.n, u);
        let q = |g: &DMatrix<f64>, w: &DMatrix<f64>| (um.transpose() * g * &um * w).trace();
        let re = -PI * q(&self.ap, &self.y) + PI * q(&self.am, &self.y);
        let im = PI * (q(&self.ap, &self.x) + q(&self.am, &self.x));
        self.eval.eval_real(u) * Complex64::new(re, im).exp()
    }
}

/// `i^{−mn/2}(−1)^{βs}|det A|^{−n/2} det(−Z⁻¹)^{r/2+α} det Z̄^{−(s/2+β)}`.
pub fn fourier_prefactor(spec: &ThetaSpec, z: &SiegelPoint) -> Result<Complex64> {
    let (m, n) = spec.shape();
    let (r, s) = spec.dec().signature();
    let (alpha, beta) = spec.coeff().degrees();
    let i_pow = Complex64::new(0.0, -PI * (m * n) as f64 / 4.0).exp();
    let sign = if (beta as usize * s).is_multiple_of(2) { 1.0 } else { -1.0 };
    let det_a = spec.dec().a().determinant().abs();
    let zi = z.neg_inverse()?;
    let d1 = det_power(&zi.z(), r as f64 / 2.0 + alpha as f64)?;
    let d2 = det_power(&z.conj(), -(s as f64 / 2.0 + beta as f64))?;
    Ok(i_pow * sign * det_a.powf(-(n as f64) / 2.0) * d1 * d2)
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m * n > 2 {
        return Err(Error::Invalid(format!("quadrature checks need m·n ≤ 2, got {m}×{n}")));
    }
    Ok(())
}

fn fourier_report(name: &str, numeric: Complex64, closed: Complex64, est: f64, l: f64) -> CheckReport {
    let tol = FOURIER_TOL.max(est);
    CheckReport::complex(name, numeric, closed, (numeric - closed).norm(), tol)
        .with("quadrature_error", est)
        .with("box", l)
}

/// Transform of `f(U) = p(U) e(tr(UᵀAUZ)/2)` for positive definite `A` and any polynomial `p`,
/// against `det A^{−n/2} det(−iZ)^{−m/2} e(−tr(VᵀAVZ⁻¹)/2) (exp(i tr(Δ_A Z⁻¹)/4π)p)(−VZ⁻¹)`.
pub fn check_fourier_general(form: &QuadForm, p: &ExactPoly, z: &SiegelPoint, v: &DMatrix<f64>) -> Result<CheckReport> {
    let (m, n) = p.shape();
    check_dims(m, n)?;
    if form.dim() != m || z.genus() != n || v.shape() != (m, n) {
        return Err(Error::Shape("form, Z, V and p must agree in shape".into()));
    }
    let a = q_to_f64(&form.to_q());
    let mu_a = min_eigenvalue(&a);
    if mu_a <= 0.0 {
        return Err(Error::NotPositiveDefinite("general Fourier check needs a positive definite form".into()));
    }
    let pf = p.to_float();
    let ev = PolyEvaluator::new(&pf);
    let (x, y) = (z.x().clone(), z.y().clone());
    let f = |u: &[f64]| -> Complex64 {
        let um = row_major_matrix(m, n, u);
        let quad = um.transpose() * &a * &um;
        let phase = Complex64::new(-PI * (&quad * &y).trace(), PI * (&quad * &x).trace() + 2.0 * PI * pairing(&a, v, &um));
        ev.eval_real(u) * phase.exp()
    };
    let l = box_half_width(pf.coeff_norm(), pf.degree(), mu_a * min_eigenvalue(&y));
    let (numeric, est) = integrate_box(m * n, l, f)?;

    let zc = z.z();
    let zinv = zc.clone().try_inverse().ok_or_else(|| Error::Singular("Z".into()))?;
    let ainv = inverse_form::<Complex64>(&form.to_q())?;
    let c = Complex64::new(0.0, 1.0 / (4.0 * PI));
    let q = exp_weighted_laplace(&pf, &ainv, &complex_rows(&zinv), &c)?;
    let vc = to_complex(v);
    let arg = -(&vc * &zinv);
    let ac = to_complex(&a);
    let expo = (vc.transpose() * &ac * &vc * &zinv).trace();
    let minus_iz = zc.map(|w| w * Complex64::new(0.0, -1.0));
    let closed = a.determinant().powf(-(n as f64) / 2.0)
        * det_power(&minus_iz, -(m as f64) / 2.0)?
        * (expo * Complex64::new(0.0, -PI)).exp()
        * q.eval(&arg)?;
    Ok(fourier_report("fourier_general", numeric, closed, est, l))
}

/// Transform of the coefficient's `f_Z` (definite) or `g_Z` (indefinite)
/// against the prefactor times the same function at `−Z⁻¹`.
pub fn check_fourier(spec: &ThetaSpec, z: &SiegelPoint, v: &DMatrix<f64>) -> Result<CheckReport> {
    let (m, n) = spec.shape();
    check_dims(m, n)?;
    if v.shape() != (m, n) {
        return Err(Error::Shape(format!("V must be {m}×{n}")));
    }
    let fz = FzFunction::new(spec, z)?;
    let a = spec.dec().a();
    let mu = min_eigenvalue(spec.dec().majorant()) * min_eigenvalue(z.y());
    let l = box_half_width(fz.poly().coeff_norm(), fz.poly().degree(), mu);
    let (numeric, est) = integrate_box(m * n, l, |u| {
        let um = row_major_matrix(m, n, u);
        fz.eval(u) * Complex64::new(0.0, 2.0 * PI * pairing(&a, v, &um)).exp()
    })?;
    let at = FzFunction::new(spec, &z.neg_inverse()?)?;
    let vr: Vec<f64> = (0..m).flat_map(|i| (0..n).map(move |j| v[(i, j)])).collect();
    let closed = fourier_prefactor(spec, z)? * at.eval(&vr);
    let name = if spec.dec().is_definite() { "fourier_definite" } else { "fourier_indefinite" };
    Ok(fourier_report(name, numeric, closed, est, l))
}

/// `∫ p(U+V) exp(−π tr(UᵀU)) dU` against `(exp(trΔ/4π)p)(V)`.
pub fn check_gauss_transform(p: &ExactPoly, v: &DMatrix<f64>) -> Result<CheckReport> {
    let (m, n) = p.shape();
    check_dims(m, n)?;
    if v.shape() != (m, n) {
        return Err(Error::Shape(format!("V must be {m}×{n}")));
    }
    let pf = p.to_float();
    let ev = PolyEvaluator::new(&pf);
    let vr: Vec<f64> = (0..m).flat_map(|i| (0..n).map(move |j| v[(i, j)])).collect();
    let c = pf.coeff_norm() * (1.0 + v.norm()).powi(pf.degree() as i32);
    let l = box_half_width(c, pf.degree(), 1.0);
    let (numeric, est) = integrate_box(m * n, l, |u| {
        let shifted: Vec<f64> = u.iter().zip(&vr).map(|(a, b)| a + b).collect();
        let w: f64 = u.iter().map(|x| x * x).sum();
        ev.eval_real(&shifted) * (-PI * w).exp()
    })?;
    let id: Vec<Vec<Complex64>> = (0..m).map(|i| (0..m).map(|j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).collect()).collect();
    let q = crate::polyalg::exp_trace_laplace(&pf, &id, &Complex64::new(1.0 / (4.0 * PI), 0.0))?;
    let closed = PolyEvaluator::new(&q).eval_real(&vr);
    let residual = (numeric - closed).norm();
    Ok(CheckReport::complex("gauss_transform", numeric, closed, residual, GAUSS_TOL).with("quadrature_error", est).with("box", l))
}

/// `Σ_{U∈ℤ^{m×n}} f_Z(U)` against `Σ_{V∈A⁻¹ℤ^{m×n}} f̂_Z(V)`, with `f̂_Z` in closed form.
pub fn check_poisson(spec: &ThetaSpec, z: &SiegelPoint, eps: f64) -> Result<CheckReport> {
    let (m, n) = spec.shape();
    let zero = ThetaSpec::zero_chars(m, n);
    let plain = spec.with_characteristics(zero.clone(), zero)?;
    let lhs = theta_eval_borcherds(&plain, z, eps)?;

    let zi = z.neg_inverse()?;
    let at = FzFunction::new(spec, &zi)?;
    let pref = fourier_prefactor(spec, z)?;
    let ainv = spec.dec().a().try_inverse().ok_or_else(|| Error::Singular("A".into()))?;
    let majorant = spec.dec().majorant();
    let gram = trace_gram(&(&ainv * majorant * &ainv), zi.y());
    let model = TailModel {
        scale: pref.norm(),
        c_poly: at.poly().coeff_norm(),
        kappa: 1.0 / (min_eigenvalue(majorant) * min_eigenvalue(zi.y())),
        degree: at.poly().degree(),
    };
    let rhs = lattice_sum(&gram, &vec![0.0; m * n], &model, eps, |w| {
        // column-stacked W to row-major V = A⁻¹W
        let wm = DMatrix::from_fn(m, n, |a, i| w[a + m * i] as f64);
        let vm = &ainv * wm;
        let vr: Vec<f64> = (0..m).flat_map(|i| (0..n).map(|j| vm[(i, j)]).collect::<Vec<_>>()).collect();
        pref * at.eval(&vr)
    })?;
    let residual = (lhs.value - rhs.value).norm();
    Ok(CheckReport::complex("poisson", lhs.value, rhs.value, residual, POISSON_TOL)
        .with("eps", eps)
        .with("terms", lhs.terms_used + rhs.terms_used)
        .with("radius", lhs.radius.max(rhs.radius)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q_zeros;
    use crate::polyalg::MatPoly;
    use crate::theta::spec::{indef_spec, posdef_spec};

    fn u1() -> ExactPoly {
        MatPoly::var(1, 1, 0, 0).unwrap()
    }

    #[test]
    fn gaussian_integral_oracle() {
        let f = QuadForm::from_name("diag:2").unwrap();
        let r = check_fourier_general(&f, &ExactPoly::one(1, 1), &SiegelPoint::i_identity(1), &DMatrix::zeros(1, 1)).unwrap();
        assert!((r.lhs[0].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(r.passed, "{r:?}");
        let odd = check_fourier_general(&f, &u1(), &SiegelPoint::i_identity(1), &DMatrix::zeros(1, 1)).unwrap();
        assert!(odd.rhs[0].as_f64().unwrap().abs() < 1e-15 && odd.passed);
    }

    #[test]
    fn moment_oracle() {
        let p = u1().mul(&u1());
        let r = check_gauss_transform(&p, &DMatrix::zeros(1, 1)).unwrap();
        assert!((r.lhs[0].as_f64().unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-12);
        assert!(r.passed);
        let lin = check_gauss_transform(&u1(), &DMatrix::from_element(1, 1, 0.3)).unwrap();
        assert!((lin.rhs[0].as_f64().unwrap() - 0.3).abs() < 1e-14 && lin.passed);
    }

    #[test]
    fn split_form_transform() {
        let f = QuadForm::from_name("diag:2,-2").unwrap();
        let one = ExactPoly::one(2, 1);
        let spec = indef_spec(&f, &one, &one, q_zeros(2, 1), q_zeros(2, 1)).unwrap();
        let v = DMatrix::from_column_slice(2, 1, &[0.2, -0.1]);
        let r = check_fourier(&spec, &SiegelPoint::scalar(0.3, 1.2).unwrap(), &v).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn poisson_on_two() {
        let f = QuadForm::from_name("diag:2").unwrap();
        let spec = posdef_spec(&f, &ExactPoly::one(1, 1), q_zeros(1, 1), q_zeros(1, 1)).unwrap();
        let r = check_poisson(&spec, &SiegelPoint::i_identity(1), 1e-14).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.rhs[0].as_f64().unwrap() - 1.0037348).abs() < 1e-7);
    }
}

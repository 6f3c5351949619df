//! Coefficient functions and the data needed to evaluate a theta series.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{q_identity, q_sub, q_zeros, QMat};
use crate::polyalg::coeff::rational_to_f64;
use crate::polyalg::ops::{exp_weighted_laplace, ring_matrix};
use crate::polyalg::{
    exp_trace_laplace, homogeneity_degree, inverse_form, vigneras_apply, Coeff, ExactPoly, ExpQuadPoly, FloatPoly,
    MatFunction, MatPoly, Ring,
};
use crate::quadform::{QuadForm, QuadFormDecomposition};

/// Coefficient `g` of the indefinite construction, exact when the
/// decomposition is rational.
#[derive(Clone, Debug, PartialEq)]
pub enum IndefFn {
    Exact(ExpQuadPoly<Coeff>),
    Float(ExpQuadPoly<Complex64>),
}

impl IndefFn {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            IndefFn::Exact(g) => g.shape(),
            IndefFn::Float(g) => g.shape(),
        }
    }

    pub fn to_float(&self) -> ExpQuadPoly<Complex64> {
        match self {
            IndefFn::Exact(g) => g.to_float(),
            IndefFn::Float(g) => g.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            IndefFn::Exact(g) => g.is_zero(),
            IndefFn::Float(g) => g.is_zero(),
        }
    }
}

/// The function `f` in the theta summand `f(UY^{1/2})`.
#[derive(Clone, Debug, PartialEq)]
pub enum ThetaCoeff {
    /// `p = exp(−trΔ_A/8π)P` with `P` homogeneous of degree `alpha`; definite forms only.
    Poly { p: ExactPoly, alpha: u32 },
    /// `g = exp(−trΔ_M/8π)(P_α(U⁺)P_β(U⁻))·exp(2π tr(UᵀA⁻U))`.
    Indef { g: IndefFn, alpha: u32, beta: u32 },
}

impl ThetaCoeff {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            ThetaCoeff::Poly { p, .. } => p.shape(),
            ThetaCoeff::Indef { g, .. } => g.shape(),
        }
    }

    /// `(α, β)`, with `β = 0` for polynomial coefficients.
    pub fn degrees(&self) -> (u32, u32) {
        match self {
            ThetaCoeff::Poly { alpha, .. } => (*alpha, 0),
            ThetaCoeff::Indef { alpha, beta, .. } => (*alpha, *beta),
        }
    }

    /// Polynomial part in float form (the Gaussian factor of `g` is handled by the majorant).
    pub fn poly_part(&self) -> FloatPoly {
        match self {
            ThetaCoeff::Poly { p, .. } => p.to_float(),
            ThetaCoeff::Indef { g, .. } => g.to_float().poly().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ThetaCoeff::Poly { p, .. } => p.is_zero(),
            ThetaCoeff::Indef { g, .. } => g.is_zero(),
        }
    }
}

fn minus_one_over_8pi<R: Ring>() -> R {
    R::from_rational(&BigRational::new((-1).into(), 8.into())).mul(&R::pi_pow(-1))
}

/// `p = exp(−trΔ_A/8π)P` for `P ∈ P_α` and positive definite `A`.
pub fn build_f_posdef(p_big: &ExactPoly, form: &QuadForm) -> Result<ExactPoly> {
    let (m, _) = p_big.shape();
    if m != form.dim() {
        return Err(Error::Shape(format!("polynomial has {m} rows, form has dimension {}", form.dim())));
    }
    if !crate::linalg::q_is_psd(&form.to_q()) {
        return Err(Error::NotPositiveDefinite("form for a polynomial coefficient".into()));
    }
    let alpha = homogeneity_degree(p_big)
        .ok_or_else(|| Error::Invalid("P does not satisfy E P = αIP for any α".into()))?;
    let ainv = inverse_form::<Coeff>(&form.to_q())?;
    let p = exp_trace_laplace(p_big, &ainv, &minus_one_over_8pi())?;
    let res = vigneras_apply(&p, &ainv)?.residual(&p, &Coeff::from_int(alpha as i64));
    if res != 0.0 {
        return Err(Error::Numerical(format!("built coefficient misses the eigen-equation by {res:e}")));
    }
    Ok(p)
}

/// `P(U) = P_α(Π⁺U)·P_β(Π⁻U)` and `g` over one ring.
fn indef_parts<R: Ring>(
    pa: &MatPoly<R>,
    pb: &MatPoly<R>,
    proj_plus: &[Vec<R>],
    proj_minus: &[Vec<R>],
    minv: &[Vec<R>],
    b: Vec<Vec<R>>,
) -> Result<ExpQuadPoly<R>> {
    let n = pa.cols();
    let id: Vec<Vec<R>> = (0..n).map(|i| (0..n).map(|j| if i == j { R::one() } else { R::zero() }).collect()).collect();
    let p = pa.substitute_linear(proj_plus, &id)?.mul(&pb.substitute_linear(proj_minus, &id)?);
    let w = id.clone();
    let poly = exp_weighted_laplace(&p, minv, &w, &minus_one_over_8pi())?;
    ExpQuadPoly::new(poly, b)
}

fn float_matrix(a: &DMatrix<f64>) -> Vec<Vec<Complex64>> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| Complex64::new(a[(i, j)], 0.0)).collect()).collect()
}

/// Builds the indefinite coefficient `g` from `P_α` (on `U⁺`) and `P_β` (on `U⁻`).
///
/// When `r < n` or `s < n` the composed product can vanish identically; the
/// zero function is returned in that case and trivially solves the equation.
pub fn build_g_indef(pa: &ExactPoly, pb: &ExactPoly, dec: &QuadFormDecomposition) -> Result<ThetaCoeff> {
    let m = dec.dim();
    if pa.shape() != pb.shape() {
        return Err(Error::Shape("P_alpha and P_beta must have the same shape".into()));
    }
    if pa.rows() != m {
        return Err(Error::Shape(format!("polynomials have {} rows, form has dimension {m}", pa.rows())));
    }
    let alpha = homogeneity_degree(pa).ok_or_else(|| Error::Invalid("P_alpha is not homogeneous of matrix type".into()))?;
    let beta = homogeneity_degree(pb).ok_or_else(|| Error::Invalid("P_beta is not homogeneous of matrix type".into()))?;
    let g = match dec.exact() {
        Some(ex) => {
            let pp: Vec<Vec<Coeff>> = ring_matrix(&ex.proj_plus);
            let pm: Vec<Vec<Coeff>> = ring_matrix(&q_sub(&q_identity(m), &ex.proj_plus));
            let minv: Vec<Vec<Coeff>> = ring_matrix(&ex.majorant_inv);
            let b: Vec<Vec<Coeff>> = ex
                .aminus
                .iter()
                .map(|r| r.iter().map(|x| Coeff::rational(x * BigRational::from_integer(2.into())).mul(&Coeff::pi_pow(1))).collect())
                .collect();
            IndefFn::Exact(indef_parts(pa, pb, &pp, &pm, &minv, b)?)
        }
        None => {
            let pp = float_matrix(dec.proj_plus());
            let pm = float_matrix(&(DMatrix::identity(m, m) - dec.proj_plus()));
            let minv_f = dec
                .majorant()
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Numerical("majorant is not invertible".into()))?;
            let minv = float_matrix(&minv_f);
            let b = float_matrix(&(dec.aminus() * (2.0 * std::f64::consts::PI)));
            IndefFn::Float(indef_parts(&pa.to_float(), &pb.to_float(), &pp, &pm, &minv, b)?)
        }
    };
    let coeff = ThetaCoeff::Indef { g, alpha, beta };
    let (_, s) = dec.signature();
    let lambda = alpha as i64 - beta as i64 - s as i64;
    let res = vigneras_residual(&coeff, dec.form(), lambda)?;
    let exact = matches!(coeff, ThetaCoeff::Indef { g: IndefFn::Exact(_), .. });
    if (exact && res != 0.0) || res > FLOAT_PDE_TOL {
        return Err(Error::Numerical(format!("built coefficient misses the eigen-equation by {res:e}")));
    }
    Ok(coeff)
}

/// Relative tolerance for the eigen-equation when the coefficient is floating.
pub const FLOAT_PDE_TOL: f64 = 1e-9;

/// Size of `𝒟_A f − λIf`: exact (zero means solved) for exact coefficients,
/// relative to the size of `f` for floating ones.
pub fn vigneras_residual(coeff: &ThetaCoeff, form: &QuadForm, lambda: i64) -> Result<f64> {
    let (m, _) = coeff.shape();
    if m != form.dim() {
        return Err(Error::Shape(format!("coefficient has {m} rows, form has dimension {}", form.dim())));
    }
    let a = form.to_q();
    match coeff {
        ThetaCoeff::Poly { p, .. } => {
            let ainv = inverse_form::<Coeff>(&a)?;
            Ok(vigneras_apply(p, &ainv)?.residual(p, &Coeff::from_int(lambda)))
        }
        ThetaCoeff::Indef { g: IndefFn::Exact(g), .. } => {
            let ainv = inverse_form::<Coeff>(&a)?;
            Ok(vigneras_apply(g, &ainv)?.residual(g, &Coeff::from_int(lambda)))
        }
        ThetaCoeff::Indef { g: IndefFn::Float(g), .. } => {
            let ainv = inverse_form::<Complex64>(&a)?;
            let res = vigneras_apply(g, &ainv)?.residual(g, &Complex64::new(lambda as f64, 0.0));
            let size = g.size();
            Ok(if size == 0.0 { res } else { res / size })
        }
    }
}

/// Everything needed to evaluate `θ_{H,K,f,A}`.
#[derive(Clone, Debug)]
pub struct ThetaSpec {
    dec: QuadFormDecomposition,
    h: QMat,
    k: QMat,
    lambda: i64,
    coeff: ThetaCoeff,
}

fn check_char(x: &QMat, m: usize, n: usize, name: &str) -> Result<()> {
    if x.len() != m || x.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("characteristic {name} must be {m}×{n}")));
    }
    Ok(())
}

impl ThetaSpec {
    /// Validates the coefficient against the form and the eigen-equation.
    pub fn new(dec: QuadFormDecomposition, h: QMat, k: QMat, coeff: ThetaCoeff) -> Result<Self> {
        let (m, n) = coeff.shape();
        if m != dec.dim() {
            return Err(Error::Shape(format!("coefficient has {m} rows, form has dimension {}", dec.dim())));
        }
        check_char(&h, m, n, "H")?;
        check_char(&k, m, n, "K")?;
        let (_, s) = dec.signature();
        let lambda = match &coeff {
            ThetaCoeff::Poly { alpha, .. } => {
                if s != 0 {
                    return Err(Error::Invalid("polynomial coefficients need a positive definite form".into()));
                }
                *alpha as i64
            }
            ThetaCoeff::Indef { g, alpha, beta } => {
                let two_pi = std::f64::consts::PI * 2.0;
                let expected = match g {
                    IndefFn::Exact(g) => dec.exact().is_some_and(|ex| {
                        let tp = Coeff::from_int(2).mul(&Coeff::pi_pow(1));
                        ex.aminus
                            .iter()
                            .zip(g.exponent())
                            .all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| Coeff::rational(x.clone()).mul(&tp) == *y))
                    }),
                    IndefFn::Float(g) => {
                        let tol = 1e-9 * two_pi * (1.0 + crate::linalg::max_abs(dec.aminus()));
                        let b = g.exponent();
                        (0..m).all(|i| (0..m).all(|j| (b[i][j] - two_pi * dec.aminus()[(i, j)]).norm() <= tol))
                    }
                };
                if !expected {
                    return Err(Error::Invalid("Gaussian exponent of g must be 2π·A⁻".into()));
                }
                *alpha as i64 - *beta as i64 - s as i64
            }
        };
        let res = vigneras_residual(&coeff, dec.form(), lambda)?;
        let exact = !matches!(coeff, ThetaCoeff::Indef { g: IndefFn::Float(_), .. });
        if (exact && res != 0.0) || res > FLOAT_PDE_TOL {
            return Err(Error::Invalid(format!("coefficient does not solve the Vignéras equation with λ={lambda} (residual {res:e})")));
        }
        Ok(ThetaSpec { dec, h, k, lambda, coeff })
    }

    /// Same coefficient with new characteristics; the eigen-equation is not rechecked.
    pub fn with_characteristics(&self, h: QMat, k: QMat) -> Result<Self> {
        let (m, n) = self.shape();
        check_char(&h, m, n, "H")?;
        check_char(&k, m, n, "K")?;
        Ok(ThetaSpec { h, k, ..self.clone() })
    }

    /// Zero characteristics for an `m×n` coefficient.
    pub fn zero_chars(m: usize, n: usize) -> QMat {
        q_zeros(m, n)
    }

    pub fn dec(&self) -> &QuadFormDecomposition {
        &self.dec
    }

    pub fn form(&self) -> &QuadForm {
        self.dec.form()
    }

    pub fn h(&self) -> &QMat {
        &self.h
    }

    pub fn k(&self) -> &QMat {
        &self.k
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    pub fn coeff(&self) -> &ThetaCoeff {
        &self.coeff
    }

    pub fn shape(&self) -> (usize, usize) {
        self.coeff.shape()
    }

    pub fn genus(&self) -> usize {
        self.shape().1
    }

    /// Weight `m/2 + λ`.
    pub fn weight(&self) -> f64 {
        self.dec.dim() as f64 / 2.0 + self.lambda as f64
    }

    /// True when `H = K = 0` and the coefficient has even total parity.
    pub fn is_symmetric_under_negation(&self) -> bool {
        let zero = |x: &QMat| x.iter().flatten().all(|v| v.is_zero());
        zero(&self.h) && zero(&self.k) && self.coeff.poly_part().parity() == Some(0)
    }

    pub fn h_f64(&self) -> DMatrix<f64> {
        rat_matrix(&self.h)
    }

    pub fn k_f64(&self) -> DMatrix<f64> {
        rat_matrix(&self.k)
    }
}

pub(crate) fn rat_matrix(x: &QMat) -> DMatrix<f64> {
    let m = x.len();
    let n = x.first().map_or(0, |r| r.len());
    DMatrix::from_fn(m, n, |a, i| rational_to_f64(&x[a][i]))
}

/// Spec with `P_α = P` (definite) from a homogeneous polynomial.
pub fn posdef_spec(form: &QuadForm, p_big: &ExactPoly, h: QMat, k: QMat) -> Result<ThetaSpec> {
    let dec = crate::quadform::decompose(form)?;
    let alpha = homogeneity_degree(p_big).ok_or_else(|| Error::Invalid("P is not homogeneous of matrix type".into()))?;
    let p = build_f_posdef(p_big, form)?;
    ThetaSpec::new(dec, h, k, ThetaCoeff::Poly { p, alpha })
}

/// Spec with the indefinite coefficient built from `P_α` and `P_β`.
pub fn indef_spec(form: &QuadForm, pa: &ExactPoly, pb: &ExactPoly, h: QMat, k: QMat) -> Result<ThetaSpec> {
    let dec = crate::quadform::decompose(form)?;
    let coeff = build_g_indef(pa, pb, &dec)?;
    ThetaSpec::new(dec, h, k, coeff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use crate::polyalg::GaussRat;

    fn u(m: usize, n: usize, a: usize, i: usize) -> ExactPoly {
        ExactPoly::var(m, n, a, i).unwrap()
    }

    #[test]
    fn posdef_square_on_two() {
        let form = QuadForm::from_name("diag:2").unwrap();
        let p = build_f_posdef(&u(1, 1, 0, 0).pow(2), &form).unwrap();
        let mut expect = u(1, 1, 0, 0).pow(2);
        expect.add_term(vec![0], Coeff::ratio_pi(-1, 8, -1));
        assert_eq!(p, expect);
        let one = ExactPoly::one(1, 1);
        assert_eq!(build_f_posdef(&one, &form).unwrap(), one);
    }

    #[test]
    fn posdef_det_on_2i() {
        let form = QuadForm::from_name("diag:2,2").unwrap();
        let det = u(2, 2, 0, 0).mul(&u(2, 2, 1, 1)).sub(&u(2, 2, 0, 1).mul(&u(2, 2, 1, 0)));
        // trΔ_A(det U) = 0 since det is harmonic, so p = det U
        assert_eq!(build_f_posdef(&det, &form).unwrap(), det);
        assert!(build_f_posdef(&u(2, 2, 0, 0), &form).is_err());
    }

    #[test]
    fn split_form_gaussian() {
        let form = QuadForm::from_name("diag:2,-2").unwrap();
        let dec = crate::quadform::decompose(&form).unwrap();
        let one = ExactPoly::one(2, 1);
        let coeff = build_g_indef(&one, &one, &dec).unwrap();
        let ThetaCoeff::Indef { g: IndefFn::Exact(g), .. } = &coeff else { panic!("expected exact g") };
        assert_eq!(g.poly(), &one);
        assert_eq!(g.exponent()[1][1], Coeff::monomial(GaussRat::real(q(-4, 1)), 1));
        let spec = ThetaSpec::new(dec, q_zeros(2, 1), q_zeros(2, 1), coeff).unwrap();
        assert_eq!(spec.lambda(), -1);
    }

    #[test]
    fn hyperbolic_linear() {
        let form = QuadForm::from_name("h2").unwrap();
        let spec = indef_spec(&form, &u(2, 1, 0, 0), &ExactPoly::one(2, 1), q_zeros(2, 1), q_zeros(2, 1)).unwrap();
        assert_eq!(spec.lambda(), 0);
        let ThetaCoeff::Indef { g: IndefFn::Exact(g), .. } = spec.coeff() else { panic!() };
        // P(U) = (u₁ + u₂)/2
        assert_eq!(g.poly().coefficient(&[1, 0]), Coeff::rational(q(1, 2)));
        assert_eq!(g.poly().coefficient(&[0, 1]), Coeff::rational(q(1, 2)));
    }

    #[test]
    fn rejects_wrong_lambda_and_shape() {
        let form = QuadForm::from_name("diag:2,2").unwrap();
        let dec = crate::quadform::decompose(&form).unwrap();
        let bad = ThetaCoeff::Poly { p: u(2, 2, 0, 0), alpha: 1 };
        assert!(ThetaSpec::new(dec.clone(), q_zeros(2, 2), q_zeros(2, 2), bad).is_err());
        let good = ThetaCoeff::Poly { p: ExactPoly::one(2, 2), alpha: 0 };
        assert!(ThetaSpec::new(dec, q_zeros(2, 1), q_zeros(2, 2), good).is_err());
    }

    #[test]
    fn float_fallback_solves_equation() {
        let form = QuadForm::new(vec![vec![1, 2], vec![2, -1]]).unwrap();
        let spec = indef_spec(&form, &u(2, 1, 0, 0), &ExactPoly::one(2, 1), q_zeros(2, 1), q_zeros(2, 1)).unwrap();
        assert!(matches!(spec.coeff(), ThetaCoeff::Indef { g: IndefFn::Float(_), .. }));
        assert_eq!(spec.lambda(), 0);
    }
}

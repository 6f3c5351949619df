//! Polynomials times a fixed Gaussian factor `exp(tr(Uᵀ B U))`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::coeff::Ring;
use super::poly::MatPoly;
use crate::error::{Error, Result};

/// `p(U)·exp(tr(UᵀBU))` with `B` symmetric `m×m`.
#[derive(Clone, PartialEq, Debug)]
pub struct ExpQuadPoly<R: Ring> {
    poly: MatPoly<R>,
    b: Vec<Vec<R>>,
}

impl<R: Ring> ExpQuadPoly<R> {
    pub fn new(poly: MatPoly<R>, b: Vec<Vec<R>>) -> Result<Self> {
        let m = poly.rows();
        if b.len() != m || b.iter().any(|r| r.len() != m) {
            return Err(Error::Shape(format!("exponent matrix must be {m}×{m}")));
        }
        for i in 0..m {
            for j in 0..i {
                if b[i][j].sub(&b[j][i]).magnitude() > 1e-12 * (1.0 + b[i][j].magnitude()) {
                    return Err(Error::NotSymmetric("Gaussian exponent matrix".into()));
                }
            }
        }
        Ok(ExpQuadPoly { poly, b })
    }

    pub fn poly(&self) -> &MatPoly<R> {
        &self.poly
    }

    pub fn exponent(&self) -> &[Vec<R>] {
        &self.b
    }

    pub fn shape(&self) -> (usize, usize) {
        self.poly.shape()
    }

    pub fn with_poly(&self, poly: MatPoly<R>) -> Self {
        ExpQuadPoly { poly, b: self.b.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// `(BU)[a][i]` as a linear polynomial.
    fn bu_entry(&self, a: usize, i: usize) -> MatPoly<R> {
        let (m, n) = self.shape();
        let mut out = MatPoly::zero(m, n);
        for c in 0..m {
            if self.b[a][c].is_zero() {
                continue;
            }
            let mut e = vec![0; m * n];
            e[c * n + i] = 1;
            out.add_term(e, self.b[a][c].clone());
        }
        out
    }

    /// `∂/∂U[a][i]` by the product rule; the exponent matrix is unchanged.
    pub fn partial(&self, a: usize, i: usize) -> Result<Self> {
        let dp = self.poly.partial(a, i)?;
        Ok(self.with_poly(self.partial_poly(&dp, a, i)))
    }

    pub(crate) fn partial_unchecked(&self, a: usize, i: usize) -> Self {
        let dp = self.poly.partial_unchecked(a, i);
        self.with_poly(self.partial_poly(&dp, a, i))
    }

    fn partial_poly(&self, dp: &MatPoly<R>, a: usize, i: usize) -> MatPoly<R> {
        let gauss = self.poly.mul(&self.bu_entry(a, i)).scale(&R::from_int(2));
        dp.add(&gauss)
    }

    /// `tr(UᵀBU)` at a complex point.
    pub fn exponent_at(&self, u: &DMatrix<Complex64>) -> Complex64 {
        let (m, n) = self.shape();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..m {
            for c in 0..m {
                let bac = self.b[a][c].to_complex();
                if bac == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..n {
                    acc += u[(a, i)] * bac * u[(c, i)];
                }
            }
        }
        acc
    }

    pub fn eval(&self, u: &DMatrix<Complex64>) -> Result<Complex64> {
        let p = self.poly.eval(u)?;
        Ok(p * self.exponent_at(u).exp())
    }

    pub fn to_float(&self) -> ExpQuadPoly<Complex64> {
        ExpQuadPoly {
            poly: self.poly.to_float(),
            b: self.b.iter().map(|r| r.iter().map(|x| x.to_complex()).collect()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::coeff::Coeff;

    fn g() -> ExpQuadPoly<Coeff> {
        // exp(-4π u₂²) on a 2×1 variable
        let z = Coeff::from_int(0);
        let b = vec![vec![z.clone(), z.clone()], vec![z, Coeff::ratio_pi(-4, 1, 1)]];
        ExpQuadPoly::new(MatPoly::one(2, 1), b).unwrap()
    }

    #[test]
    fn gaussian_at_zero() {
        let v = g().eval(&DMatrix::from_element(2, 1, Complex64::new(0.0, 0.0))).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn chain_rule() {
        let d = g().partial(1, 0).unwrap();
        let expect = MatPoly::var(2, 1, 1, 0).unwrap().scale(&Coeff::ratio_pi(-8, 1, 1));
        assert_eq!(d.poly(), &expect);
        assert_eq!(d.exponent(), g().exponent());
    }

    #[test]
    fn rejects_asymmetric_exponent() {
        let b = vec![vec![Coeff::from_int(0), Coeff::from_int(1)], vec![Coeff::from_int(0), Coeff::from_int(0)]];
        assert!(ExpQuadPoly::new(MatPoly::<Coeff>::one(2, 1), b).is_err());
    }
}

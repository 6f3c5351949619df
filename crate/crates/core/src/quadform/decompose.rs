//! Spectral splitting `A = A⁺ + A⁻` with majorant `M = A⁺ − A⁻`.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;

use super::form::QuadForm;
use crate::error::{Error, Result};
use crate::linalg::{
    int_to_f64, max_abs, q_inverse, q_is_psd, q_mul, q_sub, q_to_f64, q_transpose, rank, rationalize, QMat,
};

/// Exact rational parts of the decomposition, when they exist.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactParts {
    pub aplus: QMat,
    pub aminus: QMat,
    pub majorant: QMat,
    pub majorant_inv: QMat,
    /// `Π⁺ = M⁻¹A⁺`, so that `U⁺ = Π⁺U`.
    pub proj_plus: QMat,
}

/// Decomposition of a nondegenerate form into positive and negative parts.
#[derive(Clone, Debug)]
pub struct QuadFormDecomposition {
    form: QuadForm,
    r: usize,
    s: usize,
    s_mat: DMatrix<f64>,
    aplus: DMatrix<f64>,
    aminus: DMatrix<f64>,
    majorant: DMatrix<f64>,
    proj_plus: DMatrix<f64>,
    exact: Option<ExactParts>,
}

impl QuadFormDecomposition {
    pub fn form(&self) -> &QuadForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.r, self.s)
    }

    pub fn is_definite(&self) -> bool {
        self.s == 0
    }

    pub fn a(&self) -> DMatrix<f64> {
        int_to_f64(self.form.matrix())
    }

    /// `S` with `SᵀAS = 𝓘`; positive columns first.
    pub fn s_matrix(&self) -> &DMatrix<f64> {
        &self.s_mat
    }

    /// `𝓘 = diag(I_r, −I_s)`.
    pub fn iota(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i != j {
                0.0
            } else if i < self.r {
                1.0
            } else {
                -1.0
            }
        })
    }

    pub fn aplus(&self) -> &DMatrix<f64> {
        &self.aplus
    }

    pub fn aminus(&self) -> &DMatrix<f64> {
        &self.aminus
    }

    pub fn majorant(&self) -> &DMatrix<f64> {
        &self.majorant
    }

    pub fn proj_plus(&self) -> &DMatrix<f64> {
        &self.proj_plus
    }

    pub fn exact(&self) -> Option<&ExactParts> {
        self.exact.as_ref()
    }

    /// `(U⁺, U⁻)` with `U⁺ + U⁻ = U`.
    pub fn project(&self, u: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        if u.nrows() != self.dim() {
            return Err(Error::Shape(format!("U has {} rows, form has dimension {}", u.nrows(), self.dim())));
        }
        let plus = &self.proj_plus * u;
        let minus = u - &plus;
        Ok((plus, minus))
    }

    /// Largest violation of the defining identities, relative to `‖A‖`.
    pub fn invariant_residual(&self) -> f64 {
        let a = self.a();
        let scale = max_abs(&a).max(1.0);
        let mut worst: f64 = 0.0;
        worst = worst.max(max_abs(&(self.s_mat.transpose() * &a * &self.s_mat - self.iota())));
        worst = worst.max(max_abs(&(&self.aplus + &self.aminus - &a)) / scale);
        worst = worst.max(max_abs(&(&self.aplus - &self.aminus - &self.majorant)) / scale);
        if let Some(sinv) = self.s_mat.clone().try_inverse() {
            let mm = sinv.transpose() * &sinv;
            worst = worst.max(max_abs(&(mm - &self.majorant)) / scale);
        } else {
            return f64::INFINITY;
        }
        worst = worst.max(max_abs(&(&self.aplus * &self.aminus)) / (scale * scale));
        worst
    }
}

/// Computes the decomposition; exact rational parts are attached when the
/// spectral projections are rational.
pub fn decompose(form: &QuadForm) -> Result<QuadFormDecomposition> {
    let m = form.dim();
    let a = int_to_f64(form.matrix());
    let eig = a.clone().symmetric_eigen();
    let scale = max_abs(&a).max(1.0);
    let tol = 1e-12 * scale * m as f64;
    let mut order: Vec<usize> = (0..m).collect();
    // positive eigenvalues first, each group by decreasing magnitude
    order.sort_by(|&i, &j| {
        let (x, y) = (eig.eigenvalues[i], eig.eigenvalues[j]);
        (y > 0.0).cmp(&(x > 0.0)).then(y.abs().partial_cmp(&x.abs()).unwrap_or(std::cmp::Ordering::Equal))
    });
    if order.iter().any(|&i| eig.eigenvalues[i].abs() <= tol) {
        return Err(Error::Singular("form has a numerically vanishing eigenvalue".into()));
    }
    let r = order.iter().filter(|&&i| eig.eigenvalues[i] > 0.0).count();
    let s = m - r;
    let s_mat = DMatrix::from_fn(m, m, |row, col| {
        let k = order[col];
        eig.eigenvectors[(row, k)] / eig.eigenvalues[k].abs().sqrt()
    });
    let mut aplus = DMatrix::zeros(m, m);
    let mut aminus = DMatrix::zeros(m, m);
    for k in 0..m {
        let v = eig.eigenvectors.column(k);
        let outer = v * v.transpose() * eig.eigenvalues[k];
        if eig.eigenvalues[k] > 0.0 {
            aplus += outer;
        } else {
            aminus += outer;
        }
    }
    let exact = exact_parts(form, &aplus, r, s);
    let (aplus, aminus, majorant, proj_plus) = match &exact {
        Some(e) => (q_to_f64(&e.aplus), q_to_f64(&e.aminus), q_to_f64(&e.majorant), q_to_f64(&e.proj_plus)),
        None => {
            let majorant = &aplus - &aminus;
            let minv = majorant
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Numerical("majorant is not invertible".into()))?;
            let proj = &minv * &aplus;
            (aplus, aminus, majorant, proj)
        }
    };
    if majorant.clone().cholesky().is_none() {
        return Err(Error::Numerical("majorant is not positive definite".into()));
    }
    Ok(QuadFormDecomposition { form: form.clone(), r, s, s_mat, aplus, aminus, majorant, proj_plus, exact })
}

/// Tries to recover `A⁺` exactly and certifies the candidate in rational arithmetic.
fn exact_parts(form: &QuadForm, aplus: &DMatrix<f64>, r: usize, s: usize) -> Option<ExactParts> {
    let m = form.dim();
    let a = form.to_q();
    let mut cand: QMat = vec![vec![BigRational::zero(); m]; m];
    for i in 0..m {
        for j in 0..m {
            let x = rationalize(aplus[(i, j)], 1_000_000)?;
            if (crate::polyalg::coeff::rational_to_f64(&x) - aplus[(i, j)]).abs() > 1e-9 {
                return None;
            }
            cand[i][j] = x;
        }
    }
    if cand != q_transpose(&cand) {
        return None;
    }
    let aminus = q_sub(&a, &cand);
    if !q_mul(&cand, &aminus).iter().all(|row| row.iter().all(|x| x.is_zero())) {
        return None;
    }
    let neg_minus: QMat = aminus.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
    if !q_is_psd(&cand) || !q_is_psd(&neg_minus) {
        return None;
    }
    if (r > 0 && rank(&cand) != r) || (r == 0 && cand.iter().any(|row| row.iter().any(|x| !x.is_zero()))) {
        return None;
    }
    if (s > 0 && rank(&aminus) != s) || (s == 0 && aminus.iter().any(|row| row.iter().any(|x| !x.is_zero()))) {
        return None;
    }
    let majorant = q_sub(&cand, &aminus);
    let majorant_inv = q_inverse(&majorant).ok()?;
    let proj_plus = q_mul(&majorant_inv, &cand);
    Some(ExactParts { aplus: cand, aminus, majorant, majorant_inv, proj_plus })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
        max_abs(&(a - b)) < 1e-12
    }

    #[test]
    fn diagonal_indefinite() {
        let d = decompose(&QuadForm::from_name("diag:1,-1").unwrap()).unwrap();
        assert_eq!(d.signature(), (1, 1));
        assert!(close(d.aplus(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])));
        assert!(close(d.aminus(), &DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -1.0])));
        assert!(close(d.majorant(), &DMatrix::identity(2, 2)));
        assert!(d.exact().is_some());
    }

    #[test]
    fn hyperbolic_plane() {
        let d = decompose(&QuadForm::from_name("h2").unwrap()).unwrap();
        assert!(close(d.aplus(), &DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5])));
        assert!(close(d.aminus(), &DMatrix::from_row_slice(2, 2, &[-0.5, 0.5, 0.5, -0.5])));
        assert!(close(d.majorant(), &DMatrix::identity(2, 2)));
        assert!(d.invariant_residual() < 1e-12);
        let (p, q) = d.project(&DMatrix::from_column_slice(2, 1, &[1.0, 0.0])).unwrap();
        assert!(close(&p, &DMatrix::from_column_slice(2, 1, &[0.5, 0.5])));
        assert!(close(&q, &DMatrix::from_column_slice(2, 1, &[0.5, -0.5])));
    }

    #[test]
    fn positive_one_by_one() {
        let d = decompose(&QuadForm::from_name("diag:2").unwrap()).unwrap();
        assert!((d.s_matrix()[(0, 0)] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(close(d.majorant(), &d.a()));
        assert!(close(d.aminus(), &DMatrix::zeros(1, 1)));
    }

    #[test]
    fn e8_is_exact_and_definite() {
        let d = decompose(&QuadForm::from_name("e8").unwrap()).unwrap();
        assert_eq!(d.signature(), (8, 0));
        assert!(d.exact().is_some());
        assert!(d.invariant_residual() < 1e-12);
    }

    #[test]
    fn irrational_spectrum_falls_back_to_floats() {
        let d = decompose(&QuadForm::new(vec![vec![1, 2], vec![2, -1]]).unwrap()).unwrap();
        assert!(d.exact().is_none());
        assert_eq!(d.signature(), (1, 1));
        assert!(d.invariant_residual() < 1e-12);
    }
}

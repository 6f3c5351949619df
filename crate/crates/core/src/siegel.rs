//! The Siegel upper half-space: points, symplectic action, matrix square
//! roots and determinant powers on the principal branch.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_symmetric_f64, max_abs, to_complex};

const SYM_TOL: f64 = 1e-12;

/// `Z = X + iY` with `X` symmetric and `Y` symmetric positive definite.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SiegelPointJson {
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    pub y: Vec<Vec<f64>>,
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let c = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != c) {
        return Err(Error::Shape("ragged matrix".into()));
    }
    Ok(DMatrix::from_fn(n, c, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

impl SiegelPoint {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        let n = x.nrows();
        if !x.is_square() || y.shape() != (n, n) || n == 0 {
            return Err(Error::Shape("X and Y must be square of the same positive size".into()));
        }
        if !is_symmetric_f64(&x, SYM_TOL) || !is_symmetric_f64(&y, SYM_TOL) {
            return Err(Error::NotSymmetric("Siegel point".into()));
        }
        let x = (&x + x.transpose()) * 0.5;
        let y = (&y + y.transpose()) * 0.5;
        let lmin = y.clone().symmetric_eigen().eigenvalues.min();
        if !(lmin > 0.0) {
            return Err(Error::NotPositiveDefinite("imaginary part Y".into()));
        }
        Ok(SiegelPoint { x, y })
    }

    /// `Z = i·I_n`.
    pub fn i_identity(n: usize) -> Self {
        SiegelPoint { x: DMatrix::zeros(n, n), y: DMatrix::identity(n, n) }
    }

    pub fn from_complex(z: &DMatrix<Complex64>) -> Result<Self> {
        SiegelPoint::new(z.map(|c| c.re), z.map(|c| c.im))
    }

    /// Scalar point `x + iy` of genus one.
    pub fn scalar(x: f64, y: f64) -> Result<Self> {
        SiegelPoint::new(DMatrix::from_element(1, 1, x), DMatrix::from_element(1, 1, y))
    }

    pub fn genus(&self) -> usize {
        self.x.nrows()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn z(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.genus(), self.genus(), |i, j| Complex64::new(self.x[(i, j)], self.y[(i, j)]))
    }

    pub fn conj(&self) -> DMatrix<Complex64> {
        self.z().map(|c| c.conj())
    }

    /// `Z + S`.
    pub fn translate(&self, s: &DMatrix<f64>) -> Result<Self> {
        SiegelPoint::new(&self.x + s, self.y.clone())
    }

    /// `−Z⁻¹`.
    pub fn neg_inverse(&self) -> Result<Self> {
        let inv = self.z().try_inverse().ok_or_else(|| Error::Singular("Z is not invertible".into()))?;
        SiegelPoint::from_complex(&(-inv))
    }

    pub fn to_json(&self) -> SiegelPointJson {
        SiegelPointJson { x: matrix_to_rows(&self.x), y: matrix_to_rows(&self.y) }
    }

    pub fn from_json(j: &SiegelPointJson) -> Result<Self> {
        SiegelPoint::new(rows_to_matrix(&j.x)?, rows_to_matrix(&j.y)?)
    }
}

/// Symmetric positive definite square root.
pub fn sqrt_posdef(y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !is_symmetric_f64(y, SYM_TOL) {
        return Err(Error::NotSymmetric("matrix square root input".into()));
    }
    let eig = y.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::NotPositiveDefinite("matrix square root input".into()));
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let r = &eig.eigenvectors * d * eig.eigenvectors.transpose();
    Ok((&r + r.transpose()) * 0.5)
}

/// Eigenvalues of a complex square matrix from its Schur form.
pub fn complex_eigenvalues(w: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = w.nrows();
    if n == 1 {
        return vec![w[(0, 0)]];
    }
    let (_, t) = w.clone().schur().unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

/// `det(W)^ρ = exp(ρ Σ log μ_k)` with principal logarithms of the eigenvalues.
///
/// Fails if an eigenvalue lies on (or numerically at) the closed negative real axis.
pub fn det_power(w: &DMatrix<Complex64>, rho: f64) -> Result<Complex64> {
    if !w.is_square() {
        return Err(Error::Shape("determinant power of a non-square matrix".into()));
    }
    let scale = w.iter().fold(0.0f64, |m, c| m.max(c.norm())).max(1e-300);
    let mut log_sum = Complex64::new(0.0, 0.0);
    for mu in complex_eigenvalues(w) {
        if mu.norm() <= 1e-14 * scale {
            return Err(Error::BranchCut(format!("eigenvalue {mu} is zero")));
        }
        if mu.re < 0.0 && mu.im.abs() <= 1e-12 * mu.norm() {
            return Err(Error::BranchCut(format!("eigenvalue {mu} lies on the negative real axis")));
        }
        log_sum += mu.ln();
    }
    Ok((log_sum * rho).exp())
}

/// Integer symplectic matrix `[[A, B], [C, D]]` with `MᵀJM = J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticMatrix {
    n: usize,
    full: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct BlocksJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<i64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SymplecticJson {
    pub blocks: BlocksJson,
}

fn int_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = a.len();
    let k = b.len();
    let c = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![0i64; c]; n];
    for i in 0..n {
        for j in 0..c {
            let mut acc: i128 = 0;
            for t in 0..k {
                acc += a[i][t] as i128 * b[t][j] as i128;
            }
            out[i][j] = i64::try_from(acc).map_err(|_| Error::ResourceLimit("integer overflow".into()))?;
        }
    }
    Ok(out)
}

fn j_matrix(n: usize) -> Vec<Vec<i64>> {
    let mut j = vec![vec![0; 2 * n]; 2 * n];
    for i in 0..n {
        j[i][n + i] = 1;
        j[n + i][i] = -1;
    }
    j
}

impl SymplecticMatrix {
    pub fn from_full(full: Vec<Vec<i64>>) -> Result<Self> {
        let size = full.len();
        if size == 0 || !size.is_multiple_of(2) || full.iter().any(|r| r.len() != size) {
            return Err(Error::Shape("symplectic matrix must be 2n×2n".into()));
        }
        let n = size / 2;
        let j = j_matrix(n);
        let mt: Vec<Vec<i64>> = (0..size).map(|i| (0..size).map(|k| full[k][i]).collect()).collect();
        if int_mul(&int_mul(&mt, &j)?, &full)? != j {
            return Err(Error::Invalid("matrix is not symplectic".into()));
        }
        Ok(SymplecticMatrix { n, full })
    }

    pub fn from_blocks(a: &[Vec<i64>], b: &[Vec<i64>], c: &[Vec<i64>], d: &[Vec<i64>]) -> Result<Self> {
        let n = a.len();
        for blk in [a, b, c, d] {
            if blk.len() != n || blk.iter().any(|r| r.len() != n) {
                return Err(Error::Shape("blocks must all be n×n".into()));
            }
        }
        let mut full = vec![vec![0; 2 * n]; 2 * n];
        for i in 0..n {
            for k in 0..n {
                full[i][k] = a[i][k];
                full[i][n + k] = b[i][k];
                full[n + i][k] = c[i][k];
                full[n + i][n + k] = d[i][k];
            }
        }
        SymplecticMatrix::from_full(full)
    }

    /// `J = [[0, I], [−I, 0]]`, acting as `Z ↦ −Z⁻¹`.
    pub fn j(n: usize) -> Self {
        SymplecticMatrix { n, full: j_matrix(n) }
    }

    /// `[[I, S], [0, I]]`, acting as `Z ↦ Z + S`.
    pub fn translation(s: &[Vec<i64>]) -> Result<Self> {
        let n = s.len();
        let id: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|k| i64::from(i == k)).collect()).collect();
        let zero = vec![vec![0; n]; n];
        SymplecticMatrix::from_blocks(&id, s, &zero, &id)
    }

    /// `[[U, 0], [0, U⁻ᵀ]]` for unimodular `U`, acting as `Z ↦ UZUᵀ`.
    pub fn rotation(u: &[Vec<i64>], u_inv: &[Vec<i64>]) -> Result<Self> {
        let n = u.len();
        let zero = vec![vec![0; n]; n];
        let uit: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|k| u_inv[k][i]).collect()).collect();
        SymplecticMatrix::from_blocks(u, &zero, &zero, &uit)
    }

    pub fn genus(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> &[Vec<i64>] {
        &self.full
    }

    fn block(&self, r: usize, c: usize) -> DMatrix<Complex64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, k| Complex64::new(self.full[r * n + i][c * n + k] as f64, 0.0))
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Shape("genus mismatch".into()));
        }
        Ok(SymplecticMatrix { n: self.n, full: int_mul(&self.full, &other.full)? })
    }

    /// `M⟨Z⟩ = (AZ + B)(CZ + D)⁻¹`.
    pub fn act(&self, z: &SiegelPoint) -> Result<SiegelPoint> {
        if z.genus() != self.n {
            return Err(Error::Shape("genus mismatch".into()));
        }
        let zc = z.z();
        let (a, b, c, d) = (self.block(0, 0), self.block(0, 1), self.block(1, 0), self.block(1, 1));
        let czd = &c * &zc + &d;
        let inv = czd.clone().try_inverse().ok_or_else(|| Error::Singular("CZ + D".into()))?;
        let w = (&a * &zc + &b) * inv;
        let w = (&w + w.transpose()) * Complex64::new(0.5, 0.0);
        let out = SiegelPoint::from_complex(&w)?;
        debug_assert!(imaginary_part_residual(self, z, &out) <= 1e-10 * (1.0 + max_abs(z.y())), "imaginary part relation");
        Ok(out)
    }

    pub fn to_json(&self) -> SymplecticJson {
        let n = self.n;
        let blk = |r: usize, c: usize| -> Vec<Vec<i64>> {
            (0..n).map(|i| (0..n).map(|k| self.full[r * n + i][c * n + k]).collect()).collect()
        };
        SymplecticJson { blocks: BlocksJson { a: blk(0, 0), b: blk(0, 1), c: blk(1, 0), d: blk(1, 1) } }
    }

    pub fn from_json(j: &SymplecticJson) -> Result<Self> {
        SymplecticMatrix::from_blocks(&j.blocks.a, &j.blocks.b, &j.blocks.c, &j.blocks.d)
    }
}

/// Largest entry of `(C Z̄ + D)ᵀ Ỹ (C Z + D) − Y`, where `Ỹ = Im M⟨Z⟩`.
pub fn imaginary_part_residual(m: &SymplecticMatrix, z: &SiegelPoint, image: &SiegelPoint) -> f64 {
    let (c, d) = (m.block(1, 0), m.block(1, 1));
    let czd = &c * z.z() + &d;
    let czbd = &c * z.conj() + &d;
    let lhs = czbd.transpose() * to_complex(image.y()) * czd;
    let diff = lhs - to_complex(z.y());
    diff.iter().fold(0.0f64, |acc, x| acc.max(x.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_roots() {
        assert_eq!(sqrt_posdef(&DMatrix::identity(2, 2)).unwrap(), DMatrix::identity(2, 2));
        let r = sqrt_posdef(&DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 9.0])).unwrap();
        assert!(max_abs(&(r - DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]))) < 1e-14);
        let y = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let r = sqrt_posdef(&y).unwrap();
        assert!(max_abs(&(&r * &r - &y)) < 1e-12);
        assert!(sqrt_posdef(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
    }

    #[test]
    fn inversion_fixed_point() {
        let z = SiegelPoint::i_identity(2);
        let w = SymplecticMatrix::j(2).act(&z).unwrap();
        assert!(max_abs(&(w.x() - z.x())) < 1e-14 && max_abs(&(w.y() - z.y())) < 1e-14);
        let w = SymplecticMatrix::j(1).act(&SiegelPoint::scalar(1.0, 1.0).unwrap()).unwrap();
        assert!((w.x()[(0, 0)] + 0.5).abs() < 1e-15 && (w.y()[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn translation_adds() {
        let m = SymplecticMatrix::translation(&[vec![1, 2], vec![2, -1]]).unwrap();
        let z = SiegelPoint::i_identity(2);
        let w = m.act(&z).unwrap();
        assert!(max_abs(&(w.x() - DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -1.0]))) < 1e-14);
        assert!(SymplecticMatrix::translation(&[vec![1, 2], vec![0, 1]]).is_err());
    }

    #[test]
    fn determinant_powers() {
        let w = DMatrix::from_diagonal_element(2, 2, Complex64::new(0.0, 1.0));
        let v = det_power(&w, 0.5).unwrap();
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let v = det_power(&DMatrix::from_element(1, 1, Complex64::new(4.0, 0.0)), 1.5).unwrap();
        assert!((v - Complex64::new(8.0, 0.0)).norm() < 1e-13);
        assert!(det_power(&DMatrix::from_element(1, 1, Complex64::new(-1.0, 0.0)), 0.5).is_err());
        // det(−iZ)^{−m/2} at Z = iY is det(Y)^{−m/2}
        let y = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let z = SiegelPoint::new(DMatrix::zeros(2, 2), y.clone()).unwrap();
        let v = det_power(&(z.z() * Complex64::new(0.0, -1.0)), -1.5).unwrap();
        assert!((v.re - y.determinant().powf(-1.5)).abs() < 1e-13 && v.im.abs() < 1e-13);
    }
}

//! Small dense linear algebra helpers: exact rational elimination and
//! conversions to and from `nalgebra` matrices.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::polyalg::coeff::rational_to_f64;

/// Dense rational matrix, row-major nested vectors.
pub type QMat = Vec<Vec<BigRational>>;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qint(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_from_int(a: &[Vec<i64>]) -> QMat {
    a.iter().map(|r| r.iter().map(|&x| qint(x)).collect()).collect()
}

pub fn q_zeros(rows: usize, cols: usize) -> QMat {
    vec![vec![BigRational::zero(); cols]; rows]
}

pub fn q_identity(n: usize) -> QMat {
    let mut m = q_zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    m
}

pub fn q_mul(a: &QMat, b: &QMat) -> QMat {
    let rows = a.len();
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    let mut out = q_zeros(rows, cols);
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn q_add(a: &QMat, b: &QMat) -> QMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn q_sub(a: &QMat, b: &QMat) -> QMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn q_transpose(a: &QMat) -> QMat {
    if a.is_empty() {
        return vec![];
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn q_is_zero(a: &QMat) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

pub fn q_to_f64(a: &QMat) -> DMatrix<f64> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    DMatrix::from_fn(rows, cols, |i, j| rational_to_f64(&a[i][j]))
}

pub fn int_to_f64(a: &[Vec<i64>]) -> DMatrix<f64> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    DMatrix::from_fn(rows, cols, |i, j| a[i][j] as f64)
}

pub fn to_complex(a: &DMatrix<f64>) -> DMatrix<Complex64> {
    a.map(|x| Complex64::new(x, 0.0))
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(a: &mut QMat) -> Vec<usize> {
    let rows = a.len();
    if rows == 0 {
        return vec![];
    }
    let cols = a[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &QMat) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

/// Basis of the right kernel `{x : a·x = 0}` of a matrix with `cols` columns.
pub fn kernel(a: &QMat, cols: usize) -> Vec<Vec<BigRational>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Exact inverse of a square rational matrix.
pub fn q_inverse(a: &QMat) -> Result<QMat> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("inverse of a non-square matrix".into()));
    }
    let mut aug: QMat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return Err(Error::Singular("matrix has no inverse".into()));
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Exact determinant of an integer matrix (fraction-free Bareiss elimination).
pub fn int_det(a: &[Vec<i64>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Best rational approximation with denominator at most `max_den` (continued fractions).
pub fn rationalize(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac.abs() < 1e-13 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)))
}

/// Largest absolute entry.
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn is_symmetric_f64(a: &DMatrix<f64>, tol: f64) -> bool {
    a.is_square() && {
        let scale = max_abs(a).max(1.0);
        (0..a.nrows()).all(|i| (0..i).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= tol * scale))
    }
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    a.clone().symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue(a: &DMatrix<f64>) -> f64 {
    a.clone().symmetric_eigen().eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Checks that a rational matrix is positive semidefinite via an LDLᵀ pass.
pub fn q_is_psd(a: &QMat) -> bool {
    // Symmetric Gaussian elimination with the zero-pivot rule for semidefinite matrices.
    let n = a.len();
    let mut m = a.clone();
    for k in 0..n {
        let d = m[k][k].clone();
        if d.is_negative() {
            return false;
        }
        if d.is_zero() {
            if (k + 1..n).any(|j| !m[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &d;
            for j in k..n {
                let v = &f * &m[k][j];
                m[i][j] -= v;
            }
        }
    }
    true
}

/// Kronecker-style Gram of `tr(Uᵀ M U Y)` on column-stacked `vec(U)`, index `a + m·i`.
pub fn trace_gram(m_form: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    let m = m_form.nrows();
    let n = y.nrows();
    DMatrix::from_fn(m * n, m * n, |r, c| {
        let (a, i) = (r % m, r / m);
        let (b, j) = (c % m, c / m);
        m_form[(a, b)] * y[(i, j)]
    })
}

//! Matrix differential operators: the Euler operator `E = Uᵀ ∂/∂U`, the
//! Laplacian `Δ_A = (∂/∂U)ᵀ A⁻¹ (∂/∂U)`, operator exponentials and the
//! Vignéras operator `E − Δ_A/4π`.
//!
//! Operators take the inverse form matrix (`A⁻¹` as ring elements) so the
//! same code serves exact and floating rings. Indices are zero-based.

use num_rational::BigRational;

use super::coeff::Ring;
use super::expquad::ExpQuadPoly;
use super::poly::MatPoly;
use crate::error::{Error, Result};
use crate::linalg::{q_inverse, QMat};

/// Functions of a matrix variable that the operators can act on.
pub trait MatFunction<R: Ring>: Clone + PartialEq + std::fmt::Debug {
    fn shape(&self) -> (usize, usize);
    fn d(&self, a: usize, i: usize) -> Self;
    fn times_var(&self, a: usize, i: usize) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn times(&self, c: &R) -> Self;
    fn zero_like(&self) -> Self;
    fn vanishes(&self) -> bool;
    /// Largest coefficient magnitude of the polynomial part.
    fn size(&self) -> f64;
}

impl<R: Ring> MatFunction<R> for MatPoly<R> {
    fn shape(&self) -> (usize, usize) {
        MatPoly::shape(self)
    }
    fn d(&self, a: usize, i: usize) -> Self {
        self.partial_unchecked(a, i)
    }
    fn times_var(&self, a: usize, i: usize) -> Self {
        self.mul_var(a, i)
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn times(&self, c: &R) -> Self {
        self.scale(c)
    }
    fn zero_like(&self) -> Self {
        MatPoly::zero(self.rows(), self.cols())
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn size(&self) -> f64 {
        self.max_coeff()
    }
}

impl<R: Ring> MatFunction<R> for ExpQuadPoly<R> {
    fn shape(&self) -> (usize, usize) {
        ExpQuadPoly::shape(self)
    }
    fn d(&self, a: usize, i: usize) -> Self {
        self.partial_unchecked(a, i)
    }
    fn times_var(&self, a: usize, i: usize) -> Self {
        self.with_poly(self.poly().mul_var(a, i))
    }
    fn plus(&self, o: &Self) -> Self {
        assert_eq!(self.exponent(), o.exponent(), "sum of Gaussians with different exponents");
        self.with_poly(self.poly().add(o.poly()))
    }
    fn times(&self, c: &R) -> Self {
        self.with_poly(self.poly().scale(c))
    }
    fn zero_like(&self) -> Self {
        let (m, n) = self.shape();
        self.with_poly(MatPoly::zero(m, n))
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn size(&self) -> f64 {
        self.poly().max_coeff()
    }
}

/// `A⁻¹` of an integer or rational symmetric form, converted into the ring.
pub fn inverse_form<R: Ring>(a: &QMat) -> Result<Vec<Vec<R>>> {
    let m = a.len();
    for i in 0..m {
        if a[i].len() != m {
            return Err(Error::Shape("form matrix must be square".into()));
        }
        for j in 0..i {
            if a[i][j] != a[j][i] {
                return Err(Error::NotSymmetric("form matrix".into()));
            }
        }
    }
    let inv = q_inverse(a)?;
    Ok(ring_matrix(&inv))
}

pub fn ring_matrix<R: Ring>(a: &QMat) -> Vec<Vec<R>> {
    a.iter().map(|r| r.iter().map(R::from_rational).collect()).collect()
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i >= n || j >= n {
        return Err(Error::Index(format!("operator entry ({i},{j}) for genus {n}")));
    }
    Ok(())
}

fn check_inverse<R: Ring>(m: usize, ainv: &[Vec<R>]) -> Result<()> {
    if ainv.len() != m || ainv.iter().any(|r| r.len() != m) {
        return Err(Error::Shape(format!("inverse form must be {m}×{m}")));
    }
    Ok(())
}

/// `E_ij f = Σ_d U_di ∂f/∂U_dj`.
pub fn euler_entry<R: Ring, F: MatFunction<R>>(f: &F, i: usize, j: usize) -> Result<F> {
    let (m, n) = f.shape();
    check_pair(n, i, j)?;
    let mut out = f.zero_like();
    for d in 0..m {
        out = out.plus(&f.d(d, j).times_var(d, i));
    }
    Ok(out)
}

/// `(Δ_A)_ij f = Σ_ab ∂/∂U_ai (A⁻¹)_ab ∂f/∂U_bj`, given `ainv = A⁻¹`.
pub fn laplace_entry<R: Ring, F: MatFunction<R>>(f: &F, ainv: &[Vec<R>], i: usize, j: usize) -> Result<F> {
    let (m, n) = f.shape();
    check_pair(n, i, j)?;
    check_inverse(m, ainv)?;
    Ok(laplace_raw(f, ainv, i, j))
}

fn laplace_raw<R: Ring, F: MatFunction<R>>(f: &F, ainv: &[Vec<R>], i: usize, j: usize) -> F {
    let (m, _) = f.shape();
    let first: Vec<F> = (0..m).map(|b| f.d(b, j)).collect();
    let mut out = f.zero_like();
    for a in 0..m {
        let mut inner = f.zero_like();
        for (b, g) in first.iter().enumerate() {
            if !ainv[a][b].is_zero() && !g.vanishes() {
                inner = inner.plus(&g.times(&ainv[a][b]));
            }
        }
        if !inner.vanishes() {
            out = out.plus(&inner.d(a, i));
        }
    }
    out
}

/// `tr Δ_A f`.
pub fn trace_laplace<R: Ring, F: MatFunction<R>>(f: &F, ainv: &[Vec<R>]) -> Result<F> {
    let (m, n) = f.shape();
    check_inverse(m, ainv)?;
    let mut out = f.zero_like();
    for i in 0..n {
        out = out.plus(&laplace_raw(f, ainv, i, i));
    }
    Ok(out)
}

/// `tr(Δ_G W) f = Σ_ij W_ji (Δ_G)_ij f`, where `ginv` plays the role of `A⁻¹`.
pub fn weighted_trace_laplace<R: Ring, F: MatFunction<R>>(f: &F, ginv: &[Vec<R>], w: &[Vec<R>]) -> Result<F> {
    let (m, n) = f.shape();
    check_inverse(m, ginv)?;
    if w.len() != n || w.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("weight matrix must be {n}×{n}")));
    }
    let mut out = f.zero_like();
    for i in 0..n {
        for j in 0..n {
            if !w[j][i].is_zero() {
                out = out.plus(&laplace_raw(f, ginv, i, j).times(&w[j][i]));
            }
        }
    }
    Ok(out)
}

/// `exp(c·L) p = Σ_k c^k/k! L^k p` for an operator `L` lowering the degree by two.
pub fn exp_operator<R: Ring>(
    p: &MatPoly<R>,
    c: &R,
    mut op: impl FnMut(&MatPoly<R>) -> Result<MatPoly<R>>,
) -> Result<MatPoly<R>> {
    let mut out = p.clone();
    let mut term = p.clone();
    let mut k: i64 = 0;
    while !term.is_zero() {
        k += 1;
        let factor = c.mul(&R::from_rational(&BigRational::new(1.into(), k.into())));
        term = op(&term)?.scale(&factor);
        out = out.add(&term);
        if k > (p.degree() as i64) + 1 {
            return Err(Error::Numerical("operator exponential did not terminate".into()));
        }
    }
    Ok(out)
}

/// `exp(c·tr Δ_A) p`; the series is finite on polynomials.
pub fn exp_trace_laplace<R: Ring>(p: &MatPoly<R>, ainv: &[Vec<R>], c: &R) -> Result<MatPoly<R>> {
    check_inverse(p.rows(), ainv)?;
    exp_operator(p, c, |q| trace_laplace(q, ainv))
}

/// `exp(c·tr(Δ_G W)) p`.
pub fn exp_weighted_laplace<R: Ring>(
    p: &MatPoly<R>,
    ginv: &[Vec<R>],
    w: &[Vec<R>],
    c: &R,
) -> Result<MatPoly<R>> {
    exp_operator(p, c, |q| weighted_trace_laplace(q, ginv, w))
}

/// The constant `1/(4π)` (or a rational multiple `k/(4π)`).
pub fn quarter_over_pi<R: Ring>(k: i64) -> R {
    R::from_rational(&BigRational::new(k.into(), 4.into())).mul(&R::pi_pow(-1))
}

/// `n×n` matrix of operator images.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix<F> {
    n: usize,
    entries: Vec<F>,
}

impl<F> OperatorMatrix<F> {
    pub fn genus(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[F] {
        &self.entries
    }
}

impl<F> OperatorMatrix<F> {
    /// Largest entry size of `self − λ·I·f`.
    pub fn residual<R: Ring>(&self, f: &F, lambda: &R) -> f64
    where
        F: MatFunction<R>,
    {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let mut e = self.get(i, j).clone();
                if i == j {
                    e = e.plus(&f.times(&lambda.neg()));
                }
                worst = worst.max(e.size());
            }
        }
        worst
    }
}

/// `𝒟_A f = (E − Δ_A/4π) f` entrywise.
pub fn vigneras_apply<R: Ring, F: MatFunction<R>>(f: &F, ainv: &[Vec<R>]) -> Result<OperatorMatrix<F>> {
    let (m, n) = f.shape();
    check_inverse(m, ainv)?;
    let c: R = quarter_over_pi::<R>(-1);
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let e = euler_entry(f, i, j)?;
            let l = laplace_raw(f, ainv, i, j);
            entries.push(e.plus(&l.times(&c)));
        }
    }
    Ok(OperatorMatrix { n, entries })
}

/// Returns `α` when `E P = α·I·P` holds identically, `None` otherwise
/// (including for the zero polynomial, which has no well-defined degree).
pub fn homogeneity_degree<R: Ring>(p: &MatPoly<R>) -> Option<u32> {
    let (_, n) = p.shape();
    let (first, _) = p.terms().next()?;
    let alpha: u32 = first.iter().step_by(n).sum();
    let alpha_r = R::from_int(alpha as i64);
    for i in 0..n {
        for j in 0..n {
            let e = euler_entry(p, i, j).ok()?;
            let target = if i == j { p.scale(&alpha_r) } else { p.zero_like() };
            if e != target {
                return None;
            }
        }
    }
    Some(alpha)
}

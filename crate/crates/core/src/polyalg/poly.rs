//! Polynomials in the entries of an `m×n` matrix variable `U`.
//!
//! Variables are indexed row-major: `U[a][i]` is variable `a*n + i`. All
//! indices in this module are zero-based.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::coeff::{Coeff, Ring};
use crate::error::{Error, Result};

/// Exponent matrix stored flat, row-major.
pub type Monomial = Vec<u32>;

/// Polynomial `Σ c_e U^e` with coefficients in a [`Ring`].
#[derive(Clone, PartialEq, Debug)]
pub struct MatPoly<R: Ring> {
    m: usize,
    n: usize,
    terms: BTreeMap<Monomial, R>,
}

/// Exact-coefficient polynomial.
pub type ExactPoly = MatPoly<Coeff>;
/// Floating-coefficient polynomial.
pub type FloatPoly = MatPoly<Complex64>;

impl<R: Ring> MatPoly<R> {
    pub fn zero(m: usize, n: usize) -> Self {
        assert!(m > 0 && n > 0, "matrix variable must have positive shape");
        MatPoly { m, n, terms: BTreeMap::new() }
    }

    pub fn constant(m: usize, n: usize, c: R) -> Self {
        let mut p = Self::zero(m, n);
        p.add_term(vec![0; m * n], c);
        p
    }

    pub fn one(m: usize, n: usize) -> Self {
        Self::constant(m, n, R::one())
    }

    /// The coordinate function `U[a][i]`.
    pub fn var(m: usize, n: usize, a: usize, i: usize) -> Result<Self> {
        let mut p = Self::zero(m, n);
        p.check_index(a, i)?;
        let mut e = vec![0; m * n];
        e[a * n + i] = 1;
        p.add_term(e, R::one());
        Ok(p)
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging repeats.
    pub fn from_terms(m: usize, n: usize, terms: impl IntoIterator<Item = (Monomial, R)>) -> Result<Self> {
        let mut p = Self::zero(m, n);
        for (e, c) in terms {
            if e.len() != m * n {
                return Err(Error::Shape(format!(
                    "exponent of length {} for a {m}×{n} variable",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &R)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &[u32]) -> R {
        self.terms.get(e).cloned().unwrap_or_else(R::zero)
    }

    /// Total degree (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Adds `c·U^e` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, e: Monomial, c: R) {
        debug_assert_eq!(e.len(), self.m * self.n);
        if c.is_zero() {
            return;
        }
        let remove = match self.terms.get_mut(&e) {
            Some(x) => {
                *x = x.add(&c);
                x.is_zero()
            }
            None => {
                self.terms.insert(e, c);
                return;
            }
        };
        if remove {
            self.terms.remove(&e);
        }
    }

    fn check_index(&self, a: usize, i: usize) -> Result<()> {
        if a >= self.m || i >= self.n {
            return Err(Error::Index(format!(
                "entry ({a},{i}) of a {}×{} variable",
                self.m, self.n
            )));
        }
        Ok(())
    }

    fn check_same_shape(&self, o: &Self) {
        assert_eq!(self.shape(), o.shape(), "polynomials in different matrix variables");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_same_shape(o);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, c: &R) -> Self {
        if c.is_zero() {
            return Self::zero(self.m, self.n);
        }
        let mut out = Self::zero(self.m, self.n);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x.mul(c));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check_same_shape(o);
        let mut out = Self::zero(self.m, self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                out.add_term(e, c1.mul(c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.m, self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Multiplies by the coordinate `U[a][i]` (indices unchecked).
    pub fn mul_var(&self, a: usize, i: usize) -> Self {
        let idx = a * self.n + i;
        MatPoly {
            m: self.m,
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e[idx] += 1;
                    (e, c.clone())
                })
                .collect(),
        }
    }

    /// `∂/∂U[a][i]`.
    pub fn partial(&self, a: usize, i: usize) -> Result<Self> {
        self.check_index(a, i)?;
        Ok(self.partial_unchecked(a, i))
    }

    pub(crate) fn partial_unchecked(&self, a: usize, i: usize) -> Self {
        let idx = a * self.n + i;
        let mut out = Self::zero(self.m, self.n);
        for (e, c) in &self.terms {
            let k = e[idx];
            if k == 0 {
                continue;
            }
            let mut e = e.clone();
            e[idx] -= 1;
            out.add_term(e, c.mul(&R::from_int(k as i64)));
        }
        out
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> MatPoly<S> {
        let mut out = MatPoly::<S>::zero(self.m, self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn to_float(&self) -> FloatPoly {
        self.map_coeffs(|c| c.to_complex())
    }

    /// Sum of coefficient magnitudes.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).sum()
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// `Some(0)` if every term has even total degree, `Some(1)` if every term is odd.
    pub fn parity(&self) -> Option<u32> {
        let mut par = None;
        for e in self.terms.keys() {
            let p = e.iter().sum::<u32>() % 2;
            match par {
                None => par = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(par.unwrap_or(0))
    }

    /// Evaluates at a complex matrix.
    pub fn eval(&self, u: &DMatrix<Complex64>) -> Result<Complex64> {
        if u.shape() != (self.m, self.n) {
            return Err(Error::Shape(format!(
                "evaluation point is {}×{}, expected {}×{}",
                u.nrows(),
                u.ncols(),
                self.m,
                self.n
            )));
        }
        let flat: Vec<Complex64> = (0..self.m)
            .flat_map(|a| (0..self.n).map(move |i| (a, i)))
            .map(|(a, i)| u[(a, i)])
            .collect();
        Ok(self.eval_flat(&flat))
    }

    /// Evaluates at a flat row-major point (length `m·n`, unchecked).
    pub fn eval_flat(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = c.to_complex();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= xi.powu(k);
                }
            }
            acc += t;
        }
        acc
    }

    /// `p(L·U·N)` for `L` of size `m×m` and `N` of size `n×n`.
    pub fn substitute_linear(&self, l: &[Vec<R>], nmat: &[Vec<R>]) -> Result<Self> {
        let (m, n) = (self.m, self.n);
        if l.len() != m || l.iter().any(|r| r.len() != m) {
            return Err(Error::Shape(format!("left factor must be {m}×{m}")));
        }
        if nmat.len() != n || nmat.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!("right factor must be {n}×{n}")));
        }
        // (L U N)[a][i] = Σ_{b,j} L[a][b] U[b][j] N[j][i]
        let mut lin: Vec<Self> = Vec::with_capacity(m * n);
        for a in 0..m {
            for i in 0..n {
                let mut terms = Vec::new();
                for (b, lab) in l[a].iter().enumerate() {
                    for (j, nrow) in nmat.iter().enumerate() {
                        let c = lab.mul(&nrow[i]);
                        if !c.is_zero() {
                            let mut e = vec![0; m * n];
                            e[b * n + j] = 1;
                            terms.push((e, c));
                        }
                    }
                }
                lin.push(Self::from_terms(m, n, terms)?);
            }
        }
        let mut powers: Vec<Vec<Self>> = lin.iter().map(|p| vec![Self::one(m, n), p.clone()]).collect();
        let mut out = Self::zero(m, n);
        for (e, c) in &self.terms {
            let mut t = Self::constant(m, n, c.clone());
            for (idx, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[idx].len() <= k as usize {
                    let next = powers[idx].last().unwrap().mul(&lin[idx]);
                    powers[idx].push(next);
                }
                t = t.mul(&powers[idx][k as usize]);
            }
            out = out.add(&t);
        }
        Ok(out)
    }
}

/// Precompiled float evaluator for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct PolyEvaluator {
    terms: Vec<(Vec<(usize, u32)>, Complex64)>,
}

impl PolyEvaluator {
    pub fn new<R: Ring>(p: &MatPoly<R>) -> Self {
        PolyEvaluator {
            terms: p
                .terms()
                .map(|(e, c)| {
                    let vars = e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k)).collect();
                    (vars, c.to_complex())
                })
                .collect(),
        }
    }

    /// Evaluates at a flat row-major point.
    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (vars, c) in &self.terms {
            let mut t = *c;
            for &(i, k) in vars {
                t *= x[i].powu(k);
            }
            acc += t;
        }
        acc
    }

    /// Evaluates at a real flat point.
    pub fn eval_real(&self, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (vars, c) in &self.terms {
            let mut t = 1.0;
            for &(i, k) in vars {
                t *= x[i].powi(k as i32);
            }
            acc += c * t;
        }
        acc
    }
}

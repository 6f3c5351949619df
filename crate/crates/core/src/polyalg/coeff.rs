//! Coefficient rings for matrix polynomials.
//!
//! Two rings are provided: [`Coeff`], the exact ring of Laurent polynomials in
//! π with Gaussian-rational coefficients, and `Complex64` for fast floating
//! evaluation. Every operator in this crate is generic over [`Ring`].

use std::collections::BTreeMap;
use std::fmt;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Minimal commutative ring interface used by the polynomial algebra.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    /// `π^k` for any integer `k`.
    fn pi_pow(k: i32) -> Self;
    /// The imaginary unit.
    fn imag_unit() -> Self;
    fn to_complex(&self) -> Complex64;
    /// Whether values of this ring are stored exactly.
    const EXACT: bool;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn from_int(i: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(i)))
    }

    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }
}

impl Ring for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(rational_to_f64(r), 0.0)
    }
    fn pi_pow(k: i32) -> Self {
        Complex64::new(PI.powi(k), 0.0)
    }
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
}

/// Converts a big rational to the nearest `f64` (up to rounding of the quotient).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Parses `"p/q"` or `"p"` into a rational in lowest terms.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational string {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

/// Formats a rational as `"p/q"` in lowest terms (always with a denominator).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A Gaussian rational `re + i·im`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat { re, im: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, o: &Self) -> Self {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn mul(&self, o: &Self) -> Self {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn neg(&self) -> Self {
        GaussRat { re: -&self.re, im: -&self.im }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

/// Exact coefficient: a finite sum `Σ_k c_k π^k` with Gaussian-rational `c_k`.
///
/// Zero components are never stored, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Coeff {
    parts: BTreeMap<i32, GaussRat>,
}

impl Coeff {
    /// `c · π^k`.
    pub fn monomial(c: GaussRat, k: i32) -> Self {
        let mut parts = BTreeMap::new();
        if !c.is_zero() {
            parts.insert(k, c);
        }
        Coeff { parts }
    }

    pub fn rational(r: BigRational) -> Self {
        Coeff::monomial(GaussRat::real(r), 0)
    }

    /// `(num/den) · π^k`.
    pub fn ratio_pi(num: i64, den: i64, k: i32) -> Self {
        Coeff::monomial(
            GaussRat::real(BigRational::new(BigInt::from(num), BigInt::from(den))),
            k,
        )
    }

    /// Iterates over `(π-power, Gaussian rational)` components in increasing power.
    pub fn parts(&self) -> impl Iterator<Item = (i32, &GaussRat)> {
        self.parts.iter().map(|(k, c)| (*k, c))
    }

    fn accumulate(&mut self, k: i32, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        let remove = match self.parts.get_mut(&k) {
            Some(existing) => {
                *existing = existing.add(&c);
                existing.is_zero()
            }
            None => {
                self.parts.insert(k, c);
                false
            }
        };
        if remove {
            self.parts.remove(&k);
        }
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Coeff::default();
        }
        Coeff {
            parts: self
                .parts
                .iter()
                .map(|(k, c)| (*k, GaussRat { re: &c.re * r, im: &c.im * r }))
                .collect(),
        }
    }

    /// Sum of the absolute values of all rational components, weighted by `π^k`.
    pub fn abs_bound(&self) -> f64 {
        self.parts
            .iter()
            .map(|(k, c)| c.to_complex().norm() * PI.powi(*k))
            .sum()
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.parts {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (c.re.is_zero(), c.im.is_zero()) {
                (false, true) => write!(f, "{}", c.re)?,
                (true, false) => write!(f, "{}i", c.im)?,
                _ => write!(f, "({}+{}i)", c.re, c.im)?,
            }
            if *k != 0 {
                write!(f, "·π^{k}")?;
            }
        }
        Ok(())
    }
}

impl Ring for Coeff {
    const EXACT: bool = true;

    fn zero() -> Self {
        Coeff::default()
    }
    fn one() -> Self {
        Coeff::rational(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.parts {
            out.accumulate(*k, c.clone());
        }
        out
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = Coeff::default();
        for (k1, c1) in &self.parts {
            for (k2, c2) in &other.parts {
                out.accumulate(k1 + k2, c1.mul(c2));
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Coeff { parts: self.parts.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }
    fn from_rational(r: &BigRational) -> Self {
        Coeff::rational(r.clone())
    }
    fn pi_pow(k: i32) -> Self {
        Coeff::monomial(GaussRat::real(BigRational::one()), k)
    }
    fn imag_unit() -> Self {
        Coeff::monomial(GaussRat::new(BigRational::zero(), BigRational::one()), 0)
    }
    fn to_complex(&self) -> Complex64 {
        self.parts
            .iter()
            .map(|(k, c)| c.to_complex() * PI.powi(*k))
            .sum()
    }
}

/// Sign of a rational as `-1`, `0` or `1`.
pub fn rational_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

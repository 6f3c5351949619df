//! JSON encoding of exact polynomials.
//!
//! A polynomial is `{"m","n","terms":[{"exp","re","im","pi_pow"}]}` where
//! `exp` is the `m×n` exponent matrix and `re`/`im` are `"p/q"` strings. A
//! coefficient involving several powers of π uses one term per power. A
//! Gaussian factor adds `"B"`, an `m×m` matrix whose entries are either a
//! rational string or a list of `{"re","im","pi_pow"}` parts.

use serde::{Deserialize, Serialize};

use super::coeff::{format_rational, parse_rational, Coeff, GaussRat, Ring};
use super::expquad::ExpQuadPoly;
use super::poly::ExactPoly;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TermJson {
    pub exp: Vec<Vec<u32>>,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
    #[serde(default)]
    pub pi_pow: i32,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PartJson {
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
    #[serde(default)]
    pub pi_pow: i32,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum EntryJson {
    Rational(String),
    Integer(i64),
    Parts(Vec<PartJson>),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PolyJson {
    pub m: usize,
    pub n: usize,
    pub terms: Vec<TermJson>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<EntryJson>>>,
}

fn zero_string() -> String {
    "0/1".into()
}

fn parse_parts(re: &str, im: &str, pi_pow: i32) -> Result<Coeff> {
    Ok(Coeff::monomial(GaussRat::new(parse_rational(re)?, parse_rational(im)?), pi_pow))
}

fn coeff_parts(c: &Coeff) -> Vec<PartJson> {
    c.parts()
        .map(|(k, g)| PartJson { re: format_rational(&g.re), im: format_rational(&g.im), pi_pow: k })
        .collect()
}

impl EntryJson {
    pub fn to_coeff(&self) -> Result<Coeff> {
        match self {
            EntryJson::Rational(s) => Ok(Coeff::rational(parse_rational(s)?)),
            EntryJson::Integer(i) => Ok(Coeff::from_int(*i)),
            EntryJson::Parts(ps) => ps.iter().try_fold(Coeff::zero(), |acc, p| {
                Ok(acc.add(&parse_parts(&p.re, &p.im, p.pi_pow)?))
            }),
        }
    }

    pub fn from_coeff(c: &Coeff) -> Self {
        EntryJson::Parts(coeff_parts(c))
    }
}

impl PolyJson {
    pub fn from_poly(p: &ExactPoly) -> Self {
        let (m, n) = p.shape();
        let mut terms = Vec::new();
        for (e, c) in p.terms() {
            let exp: Vec<Vec<u32>> = e.chunks(n).map(|r| r.to_vec()).collect();
            for part in coeff_parts(c) {
                terms.push(TermJson { exp: exp.clone(), re: part.re, im: part.im, pi_pow: part.pi_pow });
            }
        }
        PolyJson { m, n, terms, b: None }
    }

    pub fn from_expquad(g: &ExpQuadPoly<Coeff>) -> Self {
        let mut out = Self::from_poly(g.poly());
        out.b = Some(g.exponent().iter().map(|r| r.iter().map(EntryJson::from_coeff).collect()).collect());
        out
    }

    pub fn to_poly(&self) -> Result<ExactPoly> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::Invalid("polynomial shape must be positive".into()));
        }
        let mut p = ExactPoly::zero(self.m, self.n);
        for t in &self.terms {
            if t.exp.len() != self.m || t.exp.iter().any(|r| r.len() != self.n) {
                return Err(Error::Shape(format!("exponent matrix must be {}×{}", self.m, self.n)));
            }
            let e: Vec<u32> = t.exp.iter().flatten().copied().collect();
            let c = parse_parts(&t.re, &t.im, t.pi_pow)?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn to_expquad(&self) -> Result<ExpQuadPoly<Coeff>> {
        let p = self.to_poly()?;
        let b = match &self.b {
            Some(rows) => rows
                .iter()
                .map(|r| r.iter().map(EntryJson::to_coeff).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
            None => vec![vec![Coeff::zero(); self.m]; self.m],
        };
        ExpQuadPoly::new(p, b)
    }
}

pub fn poly_to_json(p: &ExactPoly) -> serde_json::Value {
    serde_json::to_value(PolyJson::from_poly(p)).expect("polynomial encodes as JSON")
}

pub fn poly_from_json(v: &serde_json::Value) -> Result<ExactPoly> {
    let pj: PolyJson = serde_json::from_value(v.clone())?;
    pj.to_poly()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_pi_powers() {
        let p = ExactPoly::var(2, 1, 1, 0)
            .unwrap()
            .pow(2)
            .add(&ExactPoly::constant(2, 1, Coeff::ratio_pi(-1, 4, -1).add(&Coeff::from_int(3))));
        let v = poly_to_json(&p);
        assert_eq!(poly_from_json(&v).unwrap(), p);
    }

    #[test]
    fn expquad_round_trip() {
        let z = Coeff::zero();
        let b = vec![vec![z.clone(), z.clone()], vec![z, Coeff::ratio_pi(-4, 1, 1)]];
        let g = ExpQuadPoly::new(ExactPoly::one(2, 1), b).unwrap();
        let j = serde_json::to_string(&PolyJson::from_expquad(&g)).unwrap();
        let back: PolyJson = serde_json::from_str(&j).unwrap();
        assert_eq!(back.to_expquad().unwrap(), g);
    }

    #[test]
    fn rejects_bad_shape() {
        let v = serde_json::json!({"m":1,"n":1,"terms":[{"exp":[[1,2]],"re":"1/1","im":"0/1","pi_pow":0}]});
        assert!(poly_from_json(&v).is_err());
    }
}

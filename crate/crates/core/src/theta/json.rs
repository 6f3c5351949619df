//! Spec files for the `eval` command.
//!
//! `{"A": [[..]] | "name", "H": [[..]], "K": [[..]],
//!   "coeff": {"type": "posdef" | "indef", "P_alpha": poly, "P_beta": poly},
//!   "Z": {"X": .., "Y": ..}, "eps": 1e-10}`
//!
//! `H` and `K` default to zero; entries are `"p/q"` strings or integers.
//! Missing polynomials default to the constant 1.

use serde::{Deserialize, Serialize};

use super::spec::{indef_spec, posdef_spec, ThetaSpec};
use crate::error::{Error, Result};
use crate::linalg::{q_zeros, QMat};
use crate::polyalg::coeff::{format_rational, parse_rational};
use crate::polyalg::json::PolyJson;
use crate::polyalg::ExactPoly;
use crate::quadform::QuadForm;
use crate::siegel::{SiegelPoint, SiegelPointJson};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum FormJson {
    Name(String),
    Matrix(Vec<Vec<i64>>),
}

impl FormJson {
    pub fn to_form(&self) -> Result<QuadForm> {
        match self {
            FormJson::Name(s) => QuadForm::from_name(s),
            FormJson::Matrix(a) => QuadForm::new(a.clone()),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum RatJson {
    Str(String),
    Int(i64),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CoeffJson {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(rename = "P_alpha", default, skip_serializing_if = "Option::is_none")]
    pub p_alpha: Option<PolyJson>,
    #[serde(rename = "P_beta", default, skip_serializing_if = "Option::is_none")]
    pub p_beta: Option<PolyJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SpecFile {
    #[serde(rename = "A")]
    pub a: FormJson,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<Vec<RatJson>>>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<Vec<RatJson>>>,
    pub coeff: CoeffJson,
    #[serde(rename = "Z")]
    pub z: SiegelPointJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

pub fn rat_matrix_from_json(rows: &[Vec<RatJson>]) -> Result<QMat> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|x| match x {
                    RatJson::Str(s) => parse_rational(s),
                    RatJson::Int(i) => Ok(crate::linalg::qint(*i)),
                })
                .collect()
        })
        .collect()
}

pub fn rat_matrix_to_json(x: &QMat) -> Vec<Vec<String>> {
    x.iter().map(|r| r.iter().map(format_rational).collect()).collect()
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Builds the theta data and the evaluation point.
    pub fn build(&self) -> Result<(ThetaSpec, SiegelPoint)> {
        let form = self.a.to_form()?;
        let z = SiegelPoint::from_json(&self.z)?;
        let (m, n) = (form.dim(), z.genus());
        let chars = |x: &Option<Vec<Vec<RatJson>>>| -> Result<QMat> {
            match x {
                Some(rows) => rat_matrix_from_json(rows),
                None => Ok(q_zeros(m, n)),
            }
        };
        let (h, k) = (chars(&self.h)?, chars(&self.k)?);
        let poly = |p: &Option<PolyJson>| -> Result<ExactPoly> {
            match p {
                Some(p) => p.to_poly(),
                None => Ok(ExactPoly::one(m, n)),
            }
        };
        let pa = poly(&self.coeff.p_alpha)?;
        if pa.shape() != (m, n) {
            return Err(Error::Shape(format!("P_alpha must be {m}×{n} to match A and Z")));
        }
        let spec = match self.coeff.kind.as_str() {
            "posdef" => {
                if self.coeff.p_beta.is_some() {
                    return Err(Error::Invalid("P_beta only applies to indefinite coefficients".into()));
                }
                posdef_spec(&form, &pa, h, k)?
            }
            "indef" => indef_spec(&form, &pa, &poly(&self.coeff.p_beta)?, h, k)?,
            other => return Err(Error::Invalid(format!("unknown coefficient type {other:?}"))),
        };
        Ok((spec, z))
    }
}

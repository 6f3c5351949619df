//! JSON documents shared by the command line front end and the C interface.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::json::PolyJson;
use crate::polyalg::basis_homopol;
use crate::quadform::{coset_reps, decompose, QuadForm};
use crate::theta::json::{rat_matrix_to_json, FormJson};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct BasisJson {
    pub m: usize,
    pub n: usize,
    pub alpha: u32,
    pub dimension: usize,
    pub basis: Vec<PolyJson>,
}

pub fn basis_json(m: usize, n: usize, alpha: u32) -> Result<BasisJson> {
    let basis = basis_homopol(m, n, alpha)?;
    Ok(BasisJson { m, n, alpha, dimension: basis.len(), basis: basis.iter().map(PolyJson::from_poly).collect() })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ExactPartsJson {
    pub aplus: Vec<Vec<String>>,
    pub aminus: Vec<Vec<String>>,
    pub majorant: Vec<Vec<String>>,
    pub proj_plus: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct DecompositionJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    pub signature: [usize; 2],
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactPartsJson>,
    pub aplus: Vec<Vec<f64>>,
    pub aminus: Vec<Vec<f64>>,
    pub majorant: Vec<Vec<f64>>,
    pub proj_plus: Vec<Vec<f64>>,
    /// `S` with `SᵀAS = diag(I_r, −I_s)`.
    pub s_matrix: Vec<Vec<f64>>,
    pub invariant_residual: f64,
}

fn rows(x: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..x.nrows()).map(|i| (0..x.ncols()).map(|j| x[(i, j)]).collect()).collect()
}

pub fn decomposition_json(form: &QuadForm) -> Result<DecompositionJson> {
    let d = decompose(form)?;
    let (r, s) = d.signature();
    let exact = d.exact().map(|e| ExactPartsJson {
        aplus: rat_matrix_to_json(&e.aplus),
        aminus: rat_matrix_to_json(&e.aminus),
        majorant: rat_matrix_to_json(&e.majorant),
        proj_plus: rat_matrix_to_json(&e.proj_plus),
    });
    Ok(DecompositionJson {
        a: form.matrix().to_vec(),
        signature: [r, s],
        mode: if exact.is_some() { "exact" } else { "float" }.into(),
        exact,
        aplus: rows(d.aplus()),
        aminus: rows(d.aminus()),
        majorant: rows(d.majorant()),
        proj_plus: rows(d.proj_plus()),
        s_matrix: rows(d.s_matrix()),
        invariant_residual: d.invariant_residual(),
    })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CosetsJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    pub genus: usize,
    pub count: usize,
    pub representatives: Vec<Vec<Vec<String>>>,
}

pub fn cosets_json(form: &QuadForm, genus: usize) -> Result<CosetsJson> {
    let reps = coset_reps(form, genus)?;
    Ok(CosetsJson {
        a: form.matrix().to_vec(),
        genus,
        count: reps.len(),
        representatives: reps.iter().map(|c| rat_matrix_to_json(&c.j)).collect(),
    })
}

#[derive(Deserialize)]
struct FormFile {
    #[serde(rename = "A")]
    a: FormJson,
}

/// A form given by fixture name, inline JSON matrix, or a JSON file holding
/// either a matrix or `{"A": ..}`.
pub fn load_form(arg: &str) -> Result<QuadForm> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{arg}: {e}")))?;
        return parse_form(&text);
    }
    QuadForm::from_name(arg)
}

/// Parses `[[..]]`, `"name"` or `{"A": ..}`.
pub fn parse_form(text: &str) -> Result<QuadForm> {
    if let Ok(f) = serde_json::from_str::<FormJson>(text) {
        return f.to_form();
    }
    let f: FormFile = serde_json::from_str(text)?;
    f.a.to_form()
}

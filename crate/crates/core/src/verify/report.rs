use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of one identity check. `passed` is exactly `residual ≤ tolerance`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub lhs: Value,
    pub rhs: Value,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default)]
    pub metadata: BTreeMap<String, Value>,
}

pub fn complex_digest(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

impl CheckReport {
    pub fn new(name: impl Into<String>, lhs: Value, rhs: Value, residual: f64, tolerance: f64) -> Self {
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            residual,
            tolerance,
            // NaN residuals never pass
            passed: residual <= tolerance,
            metadata: BTreeMap::new(),
        }
    }

    pub fn complex(name: impl Into<String>, lhs: Complex64, rhs: Complex64, residual: f64, tolerance: f64) -> Self {
        Self::new(name, complex_digest(lhs), complex_digest(rhs), residual, tolerance)
    }

    pub fn with(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), v.into());
        self
    }

    /// A failed check carrying an error message, for suites that must not abort.
    pub fn error(name: impl Into<String>, err: &crate::Error) -> Self {
        let mut r = Self::new(name, Value::Null, Value::Null, f64::INFINITY, 0.0);
        r.metadata.insert("error".into(), Value::String(err.to_string()));
        r.metadata.insert("exit_code".into(), err.exit_code().into());
        r
    }
}

/// `|a − b| / max(|a|, |b|, 1)`.
pub fn relative_residual(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

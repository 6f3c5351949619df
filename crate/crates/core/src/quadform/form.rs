//! Integral symmetric quadratic forms and the named fixture registry.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{int_det, q_from_int, QMat};

/// Gram matrix of the E8 root lattice (Cartan matrix).
pub const E8: [[i64; 8]; 8] = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 0, 0, 2],
];

/// Nondegenerate integral symmetric matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadForm {
    a: Vec<Vec<i64>>,
    det: BigInt,
}

impl QuadForm {
    pub fn new(a: Vec<Vec<i64>>) -> Result<Self> {
        let m = a.len();
        if m == 0 {
            return Err(Error::Invalid("empty form".into()));
        }
        if a.iter().any(|r| r.len() != m) {
            return Err(Error::Shape("form matrix must be square".into()));
        }
        for i in 0..m {
            for j in 0..i {
                if a[i][j] != a[j][i] {
                    return Err(Error::NotSymmetric(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        let det = int_det(&a);
        if det.is_zero() {
            return Err(Error::Singular("form is degenerate".into()));
        }
        Ok(QuadForm { a, det })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }

    pub fn to_q(&self) -> QMat {
        q_from_int(&self.a)
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn is_even(&self) -> bool {
        is_even(&self.a)
    }

    pub fn is_unimodular(&self) -> bool {
        self.det.abs().is_one()
    }

    /// `-A`.
    pub fn negate(&self) -> Self {
        let a: Vec<Vec<i64>> = self.a.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        QuadForm::new(a).expect("negation preserves nondegeneracy")
    }

    /// Block-diagonal sum `A ⊕ B`.
    pub fn direct_sum(&self, o: &Self) -> Self {
        let (m1, m2) = (self.dim(), o.dim());
        let mut a = vec![vec![0; m1 + m2]; m1 + m2];
        for i in 0..m1 {
            a[i][..m1].copy_from_slice(&self.a[i]);
        }
        for i in 0..m2 {
            a[m1 + i][m1..].copy_from_slice(&o.a[i]);
        }
        QuadForm::new(a).expect("direct sum of nondegenerate forms")
    }

    /// Resolves a fixture name or parses a JSON matrix.
    ///
    /// Names: `e8`, `h2`, `diag:a,b,..`, `-name` for negation and `x+y` for
    /// direct sums, e.g. `h2+e8` or `h2+-e8`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        if name.contains('+') {
            let mut parts = name.split('+');
            let first = QuadForm::from_name(parts.next().unwrap_or(""))?;
            return parts.try_fold(first, |acc, p| Ok(acc.direct_sum(&QuadForm::from_name(p)?)));
        }
        if let Some(rest) = name.strip_prefix('-') {
            return Ok(QuadForm::from_name(rest)?.negate());
        }
        match name {
            "e8" => QuadForm::new(E8.iter().map(|r| r.to_vec()).collect()),
            "h2" => QuadForm::new(vec![vec![0, 1], vec![1, 0]]),
            _ => {
                if let Some(list) = name.strip_prefix("diag:") {
                    let d: Vec<i64> = list
                        .split(',')
                        .map(|x| x.trim().parse::<i64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::Parse(format!("bad diagonal list {list:?}")))?;
                    let m = d.len();
                    let mut a = vec![vec![0; m]; m];
                    for (i, x) in d.into_iter().enumerate() {
                        a[i][i] = x;
                    }
                    QuadForm::new(a)
                } else if name.starts_with('[') {
                    let a: Vec<Vec<i64>> = serde_json::from_str(name)?;
                    QuadForm::new(a)
                } else {
                    Err(Error::Invalid(format!("unknown form {name:?}")))
                }
            }
        }
    }
}

/// Names understood by [`QuadForm::from_name`], with a short description.
pub fn fixture_names() -> Vec<(&'static str, &'static str)> {
    vec![
        ("e8", "E8 root lattice, even unimodular, signature (8,0)"),
        ("h2", "hyperbolic plane [[0,1],[1,0]], signature (1,1)"),
        ("h2+e8", "direct sum, signature (9,1)"),
        ("diag:2,-2", "diagonal form, signature (1,1), |det| 4"),
        ("diag:2", "the form 2x²"),
        ("diag:2,2", "2I₂, 4 discriminant classes per column"),
        ("diag:2,2,-2", "signature (2,1)"),
        ("-e8", "negative definite E8"),
    ]
}

/// All diagonal entries even.
pub fn is_even(a: &[Vec<i64>]) -> bool {
    a.iter().enumerate().all(|(i, r)| r[i] % 2 == 0)
}

/// `|det A| = 1`, computed exactly.
pub fn is_unimodular(a: &[Vec<i64>]) -> bool {
    int_det(a).abs().is_one()
}

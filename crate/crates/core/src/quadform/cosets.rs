//! Representatives of `A⁻¹ℤ^{m×n} / ℤ^{m×n}` via the Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::form::QuadForm;
use crate::error::{Error, Result};

/// Default cap on the number of coset representatives.
pub const DEFAULT_COSET_CAP: u128 = 1_000_000;

/// Rational `m×n` matrix `J` with `AJ` integral and entries in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CosetRep {
    pub j: Vec<Vec<BigRational>>,
}

/// Diagonal `D` and unimodular `R` with `L·A·R = D` for some unimodular `L`.
pub struct SmithForm {
    pub diag: Vec<i128>,
    pub right: Vec<Vec<i128>>,
}

/// Smith-type diagonalization tracking only the column transform.
pub fn smith_form(a: &[Vec<i64>]) -> Result<SmithForm> {
    let m = a.len();
    let mut w: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut right: Vec<Vec<i128>> = (0..m).map(|i| (0..m).map(|j| i128::from(i == j)).collect()).collect();
    let overflow = || Error::ResourceLimit("integer overflow in Smith normal form".into());
    for t in 0..m {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..m {
                    if w[i][j] != 0 && best.is_none_or(|(bi, bj)| w[i][j].abs() < w[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Err(Error::Singular("form is degenerate".into()));
            };
            w.swap(t, pi);
            for row in w.iter_mut() {
                row.swap(t, pj);
            }
            for row in right.iter_mut() {
                row.swap(t, pj);
            }
            let p = w[t][t];
            let mut clean = true;
            for i in t + 1..m {
                let q = Integer::div_floor(&w[i][t], &p);
                if q != 0 {
                    for j in t..m {
                        w[i][j] = w[i][j].checked_sub(q.checked_mul(w[t][j]).ok_or_else(overflow)?).ok_or_else(overflow)?;
                    }
                }
                if w[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..m {
                let q = Integer::div_floor(&w[t][j], &p);
                if q != 0 {
                    for i in t..m {
                        w[i][j] = w[i][j].checked_sub(q.checked_mul(w[i][t]).ok_or_else(overflow)?).ok_or_else(overflow)?;
                    }
                    for row in right.iter_mut() {
                        row[j] = row[j].checked_sub(q.checked_mul(row[t]).ok_or_else(overflow)?).ok_or_else(overflow)?;
                    }
                }
                if w[t][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
    }
    Ok(SmithForm { diag: (0..m).map(|i| w[i][i]).collect(), right })
}

fn frac_mod1(x: BigRational) -> BigRational {
    let f = x.floor();
    x - f
}

/// Canonical column representatives of `A⁻¹ℤ^m / ℤ^m`, sorted.
pub fn column_reps(form: &QuadForm) -> Result<Vec<Vec<BigRational>>> {
    let snf = smith_form(form.matrix())?;
    let m = form.dim();
    let mut reps: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); m]];
    for (k, &d) in snf.diag.iter().enumerate() {
        let d = d.abs();
        let mut next = Vec::with_capacity(reps.len() * d as usize);
        for base in &reps {
            for t in 0..d {
                let c = BigRational::new(BigInt::from(t), BigInt::from(d));
                let v: Vec<BigRational> = (0..m)
                    .map(|i| &base[i] + &c * BigRational::from_integer(BigInt::from(snf.right[i][k])))
                    .collect();
                next.push(v);
            }
        }
        reps = next;
    }
    let mut reps: Vec<Vec<BigRational>> = reps.into_iter().map(|v| v.into_iter().map(frac_mod1).collect()).collect();
    reps.sort();
    reps.dedup();
    Ok(reps)
}

/// `|det A|^n` representatives `J` of `A⁻¹ℤ^{m×n} mod ℤ^{m×n}`.
pub fn coset_reps(form: &QuadForm, n: usize) -> Result<Vec<CosetRep>> {
    coset_reps_capped(form, n, DEFAULT_COSET_CAP)
}

pub fn coset_reps_capped(form: &QuadForm, n: usize, cap: u128) -> Result<Vec<CosetRep>> {
    let det = form.det().magnitude().to_u128().unwrap_or(u128::MAX);
    let count = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(det)).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::ResourceLimit(format!("{count} coset representatives exceed the cap of {cap}")));
    }
    let cols = column_reps(form)?;
    if cols.len() as u128 != det {
        return Err(Error::Numerical(format!("found {} column classes, expected {det}", cols.len())));
    }
    let m = form.dim();
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|base| {
                (0..cols.len()).map(move |k| {
                    let mut b = base.clone();
                    b.push(k);
                    b
                })
            })
            .collect();
    }
    Ok(out
        .into_iter()
        .map(|choice| CosetRep {
            j: (0..m).map(|a| choice.iter().map(|&k| cols[k][a].clone()).collect()).collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    #[test]
    fn two_classes_for_two() {
        let reps = coset_reps(&QuadForm::from_name("diag:2").unwrap(), 1).unwrap();
        let vals: Vec<_> = reps.iter().map(|r| r.j[0][0].clone()).collect();
        assert_eq!(vals, vec![q(0, 1), q(1, 2)]);
    }

    #[test]
    fn four_classes_for_split_form() {
        let reps = coset_reps(&QuadForm::from_name("diag:2,-2").unwrap(), 1).unwrap();
        assert_eq!(reps.len(), 4);
        for r in &reps {
            for row in &r.j {
                assert!(row[0] == q(0, 1) || row[0] == q(1, 2));
            }
        }
    }

    #[test]
    fn unimodular_has_one_class() {
        let reps = coset_reps(&QuadForm::from_name("e8").unwrap(), 2).unwrap();
        assert_eq!(reps.len(), 1);
        assert!(reps[0].j.iter().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn cap_refuses() {
        let f = QuadForm::from_name("diag:2,2").unwrap();
        assert!(matches!(coset_reps_capped(&f, 3, 10), Err(Error::ResourceLimit(_))));
        assert_eq!(coset_reps(&f, 2).unwrap().len(), 16);
    }
}

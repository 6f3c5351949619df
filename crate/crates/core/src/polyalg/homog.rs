//! Bases of the spaces `P_α^{m,n}` of polynomials with `P(UN) = det(N)^α P(U)`.
//!
//! The space is the joint kernel of `E_ij − α δ_ij`. The diagonal equations
//! restrict to monomials whose column degrees all equal `α`; the off-diagonal
//! equations are then solved by exact elimination.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::coeff::{Coeff, Ring};
use super::ops::homogeneity_degree;
use super::poly::{ExactPoly, Monomial};
use crate::error::{Error, Result};
use crate::linalg::{kernel, rank, QMat};

/// Default cap on the number of monomials of degree `nα` in `mn` variables.
pub const DEFAULT_MONOMIAL_CAP: u128 = 2_000_000;

/// Cap on the dense elimination system (rows × columns).
const SYSTEM_CAP: u128 = 40_000_000;

/// `C(n, k)` saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of monomials of total degree `nα` in `mn` variables.
pub fn monomial_count(m: usize, n: usize, alpha: u32) -> u128 {
    let vars = (m * n) as u64;
    let deg = n as u64 * alpha as u64;
    binomial(deg + vars - 1, vars - 1)
}

/// All compositions of `total` into `parts` nonnegative parts, lexicographically descending.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for rest in compositions(total - first, parts - 1) {
            let mut v = vec![first];
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

/// Monomials with every column of degree exactly `alpha`.
fn balanced_monomials(m: usize, n: usize, alpha: u32) -> Vec<Monomial> {
    let cols = compositions(alpha, m);
    let mut out: Vec<Monomial> = vec![vec![0; m * n]];
    for j in 0..n {
        let mut next = Vec::with_capacity(out.len() * cols.len());
        for base in &out {
            for c in &cols {
                let mut e = base.clone();
                for (a, &k) in c.iter().enumerate() {
                    e[a * n + j] = k;
                }
                next.push(e);
            }
        }
        out = next;
    }
    out
}

/// Basis of `P_α^{m,n}` with the default monomial cap.
pub fn basis_homopol(m: usize, n: usize, alpha: u32) -> Result<Vec<ExactPoly>> {
    basis_homopol_capped(m, n, alpha, DEFAULT_MONOMIAL_CAP)
}

/// Basis of `P_α^{m,n}`, refusing when the degree-`nα` monomial space exceeds `cap`.
///
/// Basis elements have coprime integer coefficients and are returned in a
/// deterministic order.
pub fn basis_homopol_capped(m: usize, n: usize, alpha: u32, cap: u128) -> Result<Vec<ExactPoly>> {
    if m == 0 || n == 0 {
        return Err(Error::Invalid("matrix variable must have positive shape".into()));
    }
    if alpha == 0 {
        return Ok(vec![ExactPoly::one(m, n)]);
    }
    if m < n {
        return Ok(vec![]);
    }
    let count = monomial_count(m, n, alpha);
    if count > cap {
        return Err(Error::ResourceLimit(format!(
            "{count} monomials of degree {} in {} variables exceed the cap of {cap}",
            n as u64 * alpha as u64,
            m * n
        )));
    }
    let cols = balanced_monomials(m, n, alpha);

    // Rows: one per (i, j, target monomial) for i ≠ j.
    let mut rows: BTreeMap<(usize, usize, Monomial), Vec<(usize, i64)>> = BTreeMap::new();
    for (k, e) in cols.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for d in 0..m {
                    let c = e[d * n + j];
                    if c == 0 {
                        continue;
                    }
                    let mut t = e.clone();
                    t[d * n + j] -= 1;
                    t[d * n + i] += 1;
                    rows.entry((i, j, t)).or_default().push((k, c as i64));
                }
            }
        }
    }
    let ncols = cols.len();
    if (rows.len() as u128) * (ncols as u128) > SYSTEM_CAP {
        return Err(Error::ResourceLimit(format!(
            "linear system of {}×{ncols} is too large",
            rows.len()
        )));
    }
    let mat: QMat = rows
        .values()
        .map(|entries| {
            let mut r = vec![BigRational::zero(); ncols];
            for &(k, c) in entries {
                r[k] += BigRational::from_integer(BigInt::from(c));
            }
            r
        })
        .collect();
    let ker = if mat.is_empty() {
        (0..ncols)
            .map(|k| {
                let mut v = vec![BigRational::zero(); ncols];
                v[k] = BigRational::one();
                v
            })
            .collect()
    } else {
        kernel(&mat, ncols)
    };
    ker.into_iter()
        .map(|v| {
            let v = primitive(v);
            ExactPoly::from_terms(
                m,
                n,
                cols.iter()
                    .zip(v)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(e, c)| (e.clone(), Coeff::rational(c))),
            )
        })
        .collect()
}

/// Scales a rational vector to coprime integers with a positive last nonzero entry.
fn primitive(v: Vec<BigRational>) -> Vec<BigRational> {
    let mut lcm = BigInt::one();
    for x in &v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v;
    }
    let sign = match ints.iter().rev().find(|x| !x.is_zero()) {
        Some(x) if x < &BigInt::zero() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter().map(|x| BigRational::from_integer(x * &sign / &g)).collect()
}

/// All `n×n` minors of `U`, one per increasing row subset.
pub fn minors(m: usize, n: usize) -> Vec<ExactPoly> {
    let mut out = Vec::new();
    for rows in subsets(m, n) {
        out.push(minor_det(m, n, &rows));
    }
    out
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Determinant of the submatrix of `U` on the given rows by Leibniz expansion.
fn minor_det(m: usize, n: usize, rows: &[usize]) -> ExactPoly {
    let mut out = ExactPoly::zero(m, n);
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let mut e = vec![0; m * n];
        for (col, &r) in p.iter().enumerate() {
            e[rows[r] * n + col] += 1;
        }
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        out.add_term(e, Coeff::from_int(sign));
    });
    out
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Products of `alpha` minors (multisets), each an element of `P_α^{m,n}`.
pub fn minor_products(m: usize, n: usize, alpha: u32) -> Vec<ExactPoly> {
    if alpha == 0 {
        return vec![ExactPoly::one(m, n)];
    }
    if m < n {
        return vec![];
    }
    let mins = minors(m, n);
    let mut out = Vec::new();
    fn rec(start: usize, left: u32, acc: ExactPoly, mins: &[ExactPoly], out: &mut Vec<ExactPoly>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..mins.len() {
            rec(i, left - 1, acc.mul(&mins[i]), mins, out);
        }
    }
    rec(0, alpha, ExactPoly::one(m, n), &mins, &mut out);
    out
}

/// Rank of a family of exact polynomials over the rationals.
pub fn span_rank(polys: &[ExactPoly]) -> usize {
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    for p in polys {
        for (e, _) in p.terms() {
            let next = index.len();
            index.entry(e.clone()).or_insert(next);
        }
    }
    // Each exact coefficient contributes its rational components as separate coordinates.
    let mut keys: BTreeMap<(usize, i32, bool), usize> = BTreeMap::new();
    let mut entries: Vec<Vec<((usize, i32, bool), BigRational)>> = Vec::new();
    for p in polys {
        let mut row = Vec::new();
        for (e, c) in p.terms() {
            let mi = index[e];
            for (k, g) in c.parts() {
                for (im, x) in [(false, &g.re), (true, &g.im)] {
                    if !x.is_zero() {
                        let key = (mi, k, im);
                        let next = keys.len();
                        keys.entry(key).or_insert(next);
                        row.push((key, x.clone()));
                    }
                }
            }
        }
        entries.push(row);
    }
    let width = keys.len();
    let mat: QMat = entries
        .into_iter()
        .map(|row| {
            let mut r = vec![BigRational::zero(); width];
            for (key, x) in row {
                r[keys[&key]] = x;
            }
            r
        })
        .collect();
    if mat.is_empty() || width == 0 {
        return 0;
    }
    rank(&mat)
}

/// Checks that `basis` is independent, homogeneous of degree `alpha`, and
/// spans the same space as the products of `alpha` minors.
pub fn matches_minor_span(m: usize, n: usize, alpha: u32, basis: &[ExactPoly]) -> bool {
    if basis.iter().any(|p| homogeneity_degree(p) != Some(alpha)) {
        return false;
    }
    let products = minor_products(m, n, alpha);
    let rb = span_rank(basis);
    if rb != basis.len() {
        return false;
    }
    let rp = span_rank(&products);
    let mut all = basis.to_vec();
    all.extend(products);
    rp == rb && span_rank(&all) == rb
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_dimensions() {
        let b = basis_homopol(2, 2, 1).unwrap();
        assert_eq!(b.len(), 1);
        assert!(matches_minor_span(2, 2, 1, &b));
        assert_eq!(basis_homopol(2, 1, 2).unwrap().len(), 3);
        assert!(basis_homopol(1, 2, 1).unwrap().is_empty());
        assert_eq!(basis_homopol(3, 2, 0).unwrap(), vec![ExactPoly::one(3, 2)]);
    }

    #[test]
    fn determinant_is_the_basis() {
        let b = basis_homopol(2, 2, 1).unwrap();
        let det = ExactPoly::from_terms(
            2,
            2,
            vec![(vec![1, 0, 0, 1], Coeff::from_int(1)), (vec![0, 1, 1, 0], Coeff::from_int(-1))],
        )
        .unwrap();
        assert!(b[0] == det || b[0] == det.neg());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(basis_homopol_capped(3, 2, 3, 10), Err(Error::ResourceLimit(_))));
        assert_eq!(monomial_count(2, 1, 2), 3);
        assert_eq!(binomial(10, 3), 120);
    }
}

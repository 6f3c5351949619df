//! Depth-first enumeration of lattice points in a shifted ellipsoid
//! `(v+c)ᵀG(v+c) ≤ R²`, pruned on the Cholesky factor of `G`.

use std::ops::ControlFlow;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Relative slack used when pruning; candidates are re-checked exactly at the leaves.
const PRUNE_SLACK: f64 = 1e-9;

/// `(v+c)ᵀG(v+c)` evaluated directly.
pub fn shifted_norm(g: &DMatrix<f64>, v: &[i64], c: &[f64]) -> f64 {
    let n = v.len();
    let x: Vec<f64> = (0..n).map(|i| v[i] as f64 + c[i]).collect();
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += g[(i, j)] * x[j];
        }
        acc += x[i] * row;
    }
    acc
}

/// Pruned enumerator for one ellipsoid.
#[derive(Clone, Debug)]
pub struct Enumerator {
    g: DMatrix<f64>,
    center: Vec<f64>,
    bound: f64,
    /// `q(x) = Σ_k d_k (x_k + Σ_{j>k} mu[k][j] x_j)²`
    d: Vec<f64>,
    mu: Vec<Vec<f64>>,
}

impl Enumerator {
    pub fn new(g: &DMatrix<f64>, center: &[f64], bound: f64) -> Result<Self> {
        let n = g.nrows();
        if !g.is_square() || center.len() != n {
            return Err(Error::Shape("Gram matrix and center disagree in size".into()));
        }
        if !(bound >= 0.0) {
            return Err(Error::Invalid("radius bound must be nonnegative".into()));
        }
        let chol = g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("lattice Gram matrix".into()))?;
        let r = chol.l().transpose();
        let d: Vec<f64> = (0..n).map(|k| r[(k, k)] * r[(k, k)]).collect();
        let mu: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|j| if j > k { r[(k, j)] / r[(k, k)] } else { 0.0 }).collect()).collect();
        Ok(Enumerator { g: g.clone(), center: center.to_vec(), bound, d, mu })
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Integer range of coordinate `k` given the already fixed coordinates `v[k+1..]`.
    fn range(&self, k: usize, v: &[i64], partial: f64) -> Option<(i64, i64, f64)> {
        let n = self.dim();
        let rem = self.bound - partial;
        if rem < -PRUNE_SLACK * (1.0 + self.bound) {
            return None;
        }
        let mut s = 0.0;
        for j in k + 1..n {
            s += self.mu[k][j] * (v[j] as f64 + self.center[j]);
        }
        let w = (rem.max(0.0) / self.d[k]).sqrt() * (1.0 + PRUNE_SLACK) + PRUNE_SLACK;
        let mid = -s - self.center[k];
        let lo = (mid - w).ceil();
        let hi = (mid + w).floor();
        if lo > hi {
            return None;
        }
        if lo.abs() > 1e15 || hi.abs() > 1e15 {
            return None;
        }
        Some((lo as i64, hi as i64, s))
    }

    fn dfs<B>(&self, k: usize, v: &mut [i64], partial: f64, f: &mut impl FnMut(&[i64]) -> ControlFlow<B>) -> ControlFlow<B> {
        let Some((lo, hi, s)) = self.range(k, v, partial) else {
            return ControlFlow::Continue(());
        };
        for x in lo..=hi {
            v[k] = x;
            let y = x as f64 + self.center[k] + s;
            let p = partial + self.d[k] * y * y;
            if k == 0 {
                if shifted_norm(&self.g, v, &self.center) <= self.bound {
                    f(v)?;
                }
            } else {
                self.dfs(k - 1, v, p, f)?;
            }
        }
        ControlFlow::Continue(())
    }

    /// Visits every point in deterministic order; the visitor may stop early.
    pub fn visit<B>(&self, mut f: impl FnMut(&[i64]) -> ControlFlow<B>) -> ControlFlow<B> {
        let n = self.dim();
        if n == 0 {
            return f(&[]);
        }
        let mut v = vec![0i64; n];
        self.dfs(n - 1, &mut v, 0.0, &mut f)
    }

    /// Values of the outermost (last) coordinate that can occur.
    pub fn top_range(&self) -> Vec<i64> {
        let n = self.dim();
        match self.range(n - 1, &vec![0; n], 0.0) {
            Some((lo, hi, _)) => (lo..=hi).collect(),
            None => vec![],
        }
    }

    /// Visits the subtree with the last coordinate fixed to `top`.
    pub fn visit_subtree<B>(&self, top: i64, mut f: impl FnMut(&[i64]) -> ControlFlow<B>) -> ControlFlow<B> {
        let n = self.dim();
        let mut v = vec![0i64; n];
        v[n - 1] = top;
        let y = top as f64 + self.center[n - 1];
        let p = self.d[n - 1] * y * y;
        if n == 1 {
            if p <= self.bound * (1.0 + PRUNE_SLACK) + PRUNE_SLACK && shifted_norm(&self.g, &v, &self.center) <= self.bound {
                return f(&v);
            }
            return ControlFlow::Continue(());
        }
        self.dfs(n - 2, &mut v, p, &mut f)
    }

    /// Folds each top-level subtree in parallel; results are returned in
    /// ascending order of the top coordinate so any later reduction is deterministic.
    pub fn par_fold<T: Send>(
        &self,
        init: impl Fn() -> T + Sync,
        visit: impl Fn(&mut T, &[i64]) -> ControlFlow<()> + Sync,
    ) -> Vec<(T, bool)> {
        self.top_range()
            .into_par_iter()
            .map(|top| {
                let mut acc = init();
                let flow = self.visit_subtree(top, |v| visit(&mut acc, v));
                (acc, flow.is_break())
            })
            .collect()
    }

    /// Number of points, stopping once `cap` is exceeded.
    pub fn count_capped(&self, cap: u64) -> Option<u64> {
        let mut count = 0u64;
        let flow = self.visit(|_| {
            count += 1;
            if count > cap {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if flow.is_break() {
            None
        } else {
            Some(count)
        }
    }
}

/// All integer `v` with `(v+c)ᵀG(v+c) ≤ R²`, in deterministic DFS order.
pub fn lattice_points(g: &DMatrix<f64>, center: &[f64], bound: f64) -> Result<Vec<Vec<i64>>> {
    let e = Enumerator::new(g, center, bound)?;
    let mut out = Vec::new();
    let _ = e.visit::<()>(|v| {
        out.push(v.to_vec());
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// Reference enumeration over the box `[-b, b]^N`.
pub fn brute_force_points(g: &DMatrix<f64>, center: &[f64], bound: f64, b: i64) -> Vec<Vec<i64>> {
    let n = g.nrows();
    let mut out = Vec::new();
    let mut v = vec![-b; n];
    loop {
        if shifted_norm(g, &v, center) <= bound {
            out.push(v.clone());
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            if v[k] < b {
                v[k] += 1;
                break;
            }
            v[k] = -b;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
        v.sort();
        v
    }

    #[test]
    fn one_dimensional() {
        let g = DMatrix::from_element(1, 1, 1.0);
        assert_eq!(sorted(lattice_points(&g, &[0.0], 4.0).unwrap()), vec![vec![-2], vec![-1], vec![0], vec![1], vec![2]]);
        let g2 = DMatrix::from_element(1, 1, 2.0);
        assert_eq!(sorted(lattice_points(&g2, &[0.5], 2.0).unwrap()), vec![vec![-1], vec![0]]);
    }

    #[test]
    fn unit_disc() {
        let g = DMatrix::<f64>::identity(2, 2);
        assert_eq!(lattice_points(&g, &[0.0, 0.0], 1.0).unwrap().len(), 5);
    }

    #[test]
    fn rejects_indefinite() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(lattice_points(&g, &[0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn matches_brute_force_on_skewed_form() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.9, 0.3, 0.9, 1.0, -0.2, 0.3, -0.2, 0.7]);
        let c = [0.25, -0.5, 0.1];
        let a = sorted(lattice_points(&g, &c, 9.0).unwrap());
        let b = sorted(brute_force_points(&g, &c, 9.0, 12));
        assert_eq!(a, b);
    }

    #[test]
    fn subtrees_cover_everything() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 2.0]);
        let e = Enumerator::new(&g, &[0.1, 0.2], 10.0).unwrap();
        let parts = e.par_fold(Vec::new, |acc: &mut Vec<Vec<i64>>, v| {
            acc.push(v.to_vec());
            ControlFlow::Continue(())
        });
        let joined: Vec<Vec<i64>> = parts.into_iter().flat_map(|(p, _)| p).collect();
        assert_eq!(sorted(joined), sorted(lattice_points(&g, &[0.1, 0.2], 10.0).unwrap()));
    }
}

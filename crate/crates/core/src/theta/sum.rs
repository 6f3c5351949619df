//! Truncated lattice sums of polynomial-times-Gaussian summands with an
//! analytic tail bound.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{max_eigenvalue, min_eigenvalue};
use crate::quadform::Enumerator;

/// Default cap on enumerated points; `THETA_MAX_POINTS` overrides it.
pub const DEFAULT_MAX_POINTS: u64 = 100_000_000;

pub fn max_points() -> u64 {
    std::env::var("THETA_MAX_POINTS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_POINTS)
}

/// Neumaier compensated sum of complex numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let t = acc.0 + x;
    if acc.0.abs() >= x.abs() {
        acc.1 += (acc.0 - t) + x;
    } else {
        acc.1 += (x - t) + acc.0;
    }
    acc.0 = t;
}

impl CompensatedSum {
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn merge(&mut self, o: &CompensatedSum) {
        self.add(Complex64::new(o.re.0, o.im.0));
        self.add(Complex64::new(o.re.1, o.im.1));
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Majorant `|F(v)| ≤ scale · c_poly · (1 + kappa·q)^{deg/2} · exp(−π q)`
/// where `q = (v+c)ᵀG(v+c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailModel {
    pub scale: f64,
    pub c_poly: f64,
    pub kappa: f64,
    pub degree: u32,
}

/// Result of a truncated sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSum {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms_used: u64,
    /// `R` with the summation region `q ≤ R²`.
    pub radius: f64,
}

/// `Σ_{v∈ℤ^N} exp(−π t vᵀGv)`, bounded from above; this also bounds every
/// shifted sum `Σ exp(−π t (v+c)ᵀG(v+c))` by Poisson summation.
fn theta_mass_bound(g: &DMatrix<f64>, t: f64) -> f64 {
    let n = g.nrows() as i32;
    let lo = min_eigenvalue(g) * t;
    let hi = max_eigenvalue(g) * t;
    // Σ_k exp(−π a k²) ≤ 1 + 1/√a
    let direct = (1.0 + 1.0 / lo.sqrt()).powi(n);
    let det = (g * t).determinant();
    let dual = (1.0 + hi.sqrt()).powi(n) / det.sqrt();
    direct.min(dual)
}

/// `sup_{q ≥ r2} (1+κq)^{d/2} exp(−π(1−t)q)`.
fn weight_sup(kappa: f64, degree: u32, t: f64, r2: f64) -> f64 {
    let a = PI * (1.0 - t);
    let half = degree as f64 / 2.0;
    let q_star = if degree == 0 { r2 } else { (half / a - 1.0 / kappa).max(r2) };
    (half * (1.0 + kappa * q_star).ln() - a * q_star).exp()
}

const T_GRID: [f64; 7] = [0.3, 0.5, 0.65, 0.8, 0.9, 0.95, 0.98];

/// `ln Γ(k/2)` for `k ≥ 1`.
fn ln_gamma_half(k: usize) -> f64 {
    let (mut x, mut acc) = if k.is_multiple_of(2) { (1.0, 0.0) } else { (0.5, 0.5 * PI.ln()) };
    while x < k as f64 / 2.0 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// Tail from the point count `N(s) ≤ V_N (√s + μ)^N / √det G`, where `μ ≤ ½√(Σ d_k)`
/// bounds the covering radius through the Cholesky diagonal.
///
/// With `w` the majorant and `g = Ñ·w` log-concave, the tail is at most
/// `∫_{R²}^∞ Ñ(−w') ≤ π g(R²) / r(R²)` with `r = −(ln g)'`, valid when `r(R²) > 0`.
fn counting_tail(g: &DMatrix<f64>, model: &TailModel, r2: f64) -> f64 {
    let n = g.nrows();
    let chol = match g.clone().cholesky() {
        Some(c) => c,
        None => return f64::INFINITY,
    };
    let l = chol.l();
    let diag_sum: f64 = (0..n).map(|k| l[(k, k)] * l[(k, k)]).sum();
    let mu = 0.5 * diag_sum.sqrt();
    let ln_sqrt_det: f64 = (0..n).map(|k| l[(k, k)].ln()).sum();
    let ln_ball = n as f64 / 2.0 * PI.ln() - ln_gamma_half(n + 2);
    let a = r2.max(1e-12);
    let sa = a.sqrt();
    let half = model.degree as f64 / 2.0;
    let rate = PI - n as f64 / (2.0 * sa * (sa + mu)) - model.kappa * half / (1.0 + model.kappa * a);
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    let ln_g = (model.scale * model.c_poly).ln() + ln_ball + n as f64 * (sa + mu).ln() - ln_sqrt_det
        + half * (1.0 + model.kappa * a).ln()
        - PI * a;
    PI * ln_g.exp() / rate
}

/// Certified tail of the sum outside `q ≤ r2`: the smaller of the split-Gaussian
/// bound (minimized over the split parameter) and the point-count bound.
pub fn tail_bound(g: &DMatrix<f64>, model: &TailModel, r2: f64) -> f64 {
    T_GRID
        .iter()
        .map(|&t| model.scale * model.c_poly * weight_sup(model.kappa, model.degree, t, r2) * theta_mass_bound(g, t))
        .fold(counting_tail(g, model, r2), f64::min)
}

/// Smallest `R²` (up to bisection accuracy) with tail below `eps`.
pub fn radius_for(g: &DMatrix<f64>, model: &TailModel, eps: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0) {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    if model.c_poly == 0.0 || model.scale == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut hi = 1.0;
    while tail_bound(g, model, hi) >= eps {
        hi *= 2.0;
        if hi > 1e7 {
            return Err(Error::ResourceLimit(format!("no radius reaches the tail bound {eps:e}")));
        }
    }
    let mut lo = if hi > 1.0 { hi / 2.0 } else { 0.0 };
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if tail_bound(g, model, mid) < eps {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-3 * hi {
            break;
        }
    }
    Ok((hi, tail_bound(g, model, hi)))
}

/// Sums `F(v)` over the integer `v` with `(v+c)ᵀG(v+c) ≤ R²`, choosing `R`
/// so the majorant tail is below `eps`.
///
/// Subtrees are summed in parallel and merged in a fixed order.
pub fn lattice_sum(
    g: &DMatrix<f64>,
    center: &[f64],
    model: &TailModel,
    eps: f64,
    summand: impl Fn(&[i64]) -> Complex64 + Sync,
) -> Result<LatticeSum> {
    let (r2, tail) = radius_for(g, model, eps)?;
    sum_within(g, center, r2, tail, summand)
}

/// Sums over a fixed region `q ≤ r2`.
pub fn sum_within(
    g: &DMatrix<f64>,
    center: &[f64],
    r2: f64,
    tail: f64,
    summand: impl Fn(&[i64]) -> Complex64 + Sync,
) -> Result<LatticeSum> {
    let e = Enumerator::new(g, center, r2)?;
    let cap = max_points();
    let seen = AtomicU64::new(0);
    let parts = e.par_fold(
        || (CompensatedSum::default(), 0u64),
        |acc, v| {
            if seen.fetch_add(1, Ordering::Relaxed) >= cap {
                return ControlFlow::Break(());
            }
            acc.0.add(summand(v));
            acc.1 += 1;
            ControlFlow::Continue(())
        },
    );
    if parts.iter().any(|(_, broke)| *broke) {
        return Err(Error::ResourceLimit(format!(
            "more than {cap} lattice points needed (set THETA_MAX_POINTS to raise the cap)"
        )));
    }
    let mut total = CompensatedSum::default();
    let mut terms = 0;
    for ((s, k), _) in &parts {
        total.merge(s);
        terms += k;
    }
    Ok(LatticeSum { value: total.value(), tail_bound: tail, terms_used: terms, radius: r2.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss_model() -> TailModel {
        TailModel { scale: 1.0, c_poly: 1.0, kappa: 1.0, degree: 0 }
    }

    #[test]
    fn one_dimensional_gaussian() {
        let g = DMatrix::from_element(1, 1, 2.0);
        let s = lattice_sum(&g, &[0.0], &gauss_model(), 1e-14, |v| {
            Complex64::new((-2.0 * PI * (v[0] * v[0]) as f64).exp(), 0.0)
        })
        .unwrap();
        let direct: f64 = (-20..=20).map(|u: i64| (-2.0 * PI * (u * u) as f64).exp()).sum();
        assert!((s.value.re - direct).abs() < 1e-14);
        assert!(s.tail_bound < 1e-14);
    }

    #[test]
    fn bound_dominates_true_tail() {
        let g = DMatrix::from_element(1, 1, 0.3);
        let model = TailModel { scale: 1.0, c_poly: 1.0, kappa: 1.0 / 0.3, degree: 4 };
        for r2 in [1.0, 4.0, 9.0] {
            let true_tail: f64 = (-400i64..=400)
                .map(|u| 0.3 * (u * u) as f64)
                .filter(|&q| q > r2)
                .map(|q| (q / 0.3).powi(2) * (-PI * q).exp())
                .sum();
            assert!(tail_bound(&g, &model, r2) >= true_tail);
        }
    }

    #[test]
    fn counting_bound_dominates_skewed_tail() {
        let g = DMatrix::from_row_slice(2, 2, &[1.3, 0.9, 0.9, 0.8]);
        let model = TailModel { scale: 1.0, c_poly: 1.0, kappa: 2.0, degree: 2 };
        for r2 in [2.0, 5.0, 10.0] {
            let mut true_tail = 0.0;
            for a in -80i64..=80 {
                for b in -80i64..=80 {
                    let (x, y) = (a as f64, b as f64);
                    let q = 1.3 * x * x + 1.8 * x * y + 0.8 * y * y;
                    if q > r2 {
                        true_tail += (1.0 + 2.0 * q) * (-PI * q).exp();
                    }
                }
            }
            let c = counting_tail(&g, &model, r2);
            assert!(c.is_finite() && c >= true_tail, "{r2}: {c} < {true_tail}");
        }
    }

    #[test]
    fn gamma_half_values() {
        assert!((ln_gamma_half(1) - 0.5 * PI.ln()).abs() < 1e-15);
        assert!((ln_gamma_half(10) - 24f64.ln()).abs() < 1e-14);
        assert!((ln_gamma_half(5) - (0.75 * PI.sqrt()).ln()).abs() < 1e-14);
    }

    #[test]
    fn compensation_recovers_cancellation() {
        let mut s = CompensatedSum::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(Complex64::new(x, 0.0));
        }
        assert_eq!(s.value().re, 2.0);
    }
}

//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use siegel_theta::linalg::{q, q_zeros, QMat};
use siegel_theta::polyalg::{basis_homopol, inverse_form, Coeff, ExactPoly};
use siegel_theta::quadform::{decompose, lattice_points, QuadForm};
use siegel_theta::siegel::SiegelPoint;
use siegel_theta::theta::{
    borcherds_normalization, build_f_posdef, build_g_indef, indef_spec, posdef_spec, theta_eval,
    theta_eval_borcherds, vigneras_residual, ThetaCoeff, ThetaSpec,
};
use siegel_theta::verify::holomorphy::{isotropic_square, FD_STEP};
use siegel_theta::verify::operators::check_commutator;
use siegel_theta::verify::random::{random_siegel, random_symmetric, rng};
use siegel_theta::verify::suite::{half_pattern, unit_spec};
use siegel_theta::verify::{check_holomorphy, check_inversion, check_translation, run_suite, Suite, SuiteOptions};
use siegel_theta::Result;

const TRANSLATION_TOL: f64 = 1e-10;
const INVERSION_TOL: f64 = 1e-8;
const GAUSS_TOL: f64 = 1e-8;
const FOURIER_TOL: f64 = 1e-6;
const POISSON_TOL: f64 = 1e-8;
const CROSS_TOL: f64 = 1e-12;
const HOLOMORPHY_TOL: f64 = 1e-6;
const EPS: f64 = 1e-13;

const GRID: [(usize, usize); 3] = [(2, 1), (2, 2), (3, 2)];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn run(id: usize, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let res = f();
    let took = start.elapsed();
    let in_time = limit.is_none_or(|l| took <= l);
    let (ok, detail) = match res {
        Ok(o) => (o.passed && in_time, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let verdict = if ok { "PASS" } else { "FAIL" };
    let budget = limit.map_or(String::new(), |l| format!(", limit {} s", l.as_secs()));
    println!("{verdict} criterion {id}: {title}: {detail} [{:.1} s{budget}]", took.as_secs_f64());
    ok
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn form(name: &str) -> QuadForm {
    QuadForm::from_name(name).expect("named form")
}

fn criterion_1() -> Result<Outcome> {
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    let mut polys = 0u64;
    for shape in GRID {
        let rep = check_commutator(&mut r, shape, 6, 20, 3, 5)?;
        worst = worst.max(rep.residual);
        polys += rep.metadata["polynomials"].as_u64().unwrap_or(0);
    }
    outcome(worst == 0.0, format!("{polys} polynomials, k ≤ 3, worst residual {worst:e}"))
}

/// Gram matrix of the root lattice A_m: 2 on the diagonal, 1 beside it.
fn root_lattice(m: usize) -> Result<QuadForm> {
    QuadForm::new(
        (0..m)
            .map(|i| (0..m).map(|j| if i == j { 2 } else { i64::from(i.abs_diff(j) == 1) }).collect())
            .collect(),
    )
}

fn criterion_2() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let (mut definite, mut indefinite, mut zero) = (0, 0, 0);
    for (m, n) in GRID {
        let f = root_lattice(m)?;
        for alpha in 0..=3u32 {
            for p_big in basis_homopol(m, n, alpha)? {
                let p = build_f_posdef(&p_big, &f)?;
                worst = worst.max(vigneras_residual(&ThetaCoeff::Poly { p, alpha }, &f, alpha as i64)?);
                definite += 1;
            }
        }
    }
    let cases: [(&str, &[usize]); 3] = [("diag:2,-2", &[1, 2]), ("h2", &[1, 2]), ("diag:2,2,-2", &[2])];
    for (name, genera) in cases {
        let f = form(name);
        let dec = decompose(&f)?;
        let (_, s) = dec.signature();
        for &n in genera {
            let m = f.dim();
            for alpha in 0..=2u32 {
                for beta in 0..=2u32 {
                    for pa in basis_homopol(m, n, alpha)? {
                        for pb in basis_homopol(m, n, beta)? {
                            let g = build_g_indef(&pa, &pb, &dec)?;
                            if g.is_zero() {
                                zero += 1;
                            }
                            worst = worst.max(vigneras_residual(&g, &f, alpha as i64 - beta as i64 - s as i64)?);
                            indefinite += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(
        worst == 0.0,
        format!("{definite} definite and {indefinite} indefinite solutions ({zero} identically zero), worst residual {worst:e}"),
    )
}

fn characteristic(label: &str, m: usize, n: usize) -> QMat {
    if label == "half" {
        half_pattern(m, n)
    } else {
        q_zeros(m, n)
    }
}

fn criterion_3() -> Result<Outcome> {
    let mut r = rng(303);
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for name in ["diag:2", "e8", "diag:2,-2"] {
        let f = form(name);
        let m = f.dim();
        for n in [1usize, 2] {
            // keeps the 16-variable sums affordable
            let y_min = if m * n >= 16 { 2.5 } else { 0.8 };
            for hl in ["zero", "half"] {
                for kl in ["zero", "half"] {
                    let spec = unit_spec(&f, n, characteristic(hl, m, n), characteristic(kl, m, n))?;
                    for _ in 0..3 {
                        let s = loop {
                            let s = random_symmetric(&mut r, n, 2);
                            if s.iter().flatten().any(|&x| x != 0) {
                                break s;
                            }
                        };
                        let z = random_siegel(&mut r, n, y_min);
                        worst = worst.max(check_translation(&spec, &z, &s, EPS)?.residual);
                        checks += 1;
                    }
                }
            }
        }
    }
    outcome(worst <= TRANSLATION_TOL, format!("{checks} checks, worst residual {worst:e}"))
}

fn criterion_4() -> Result<Outcome> {
    let e8 = form("e8");
    let spec = unit_spec(&e8, 1, q_zeros(8, 1), q_zeros(8, 1))?;
    let mut worst: f64 = 0.0;
    for z in [Complex64::new(0.0, 1.0), Complex64::new(0.2, 0.6), Complex64::new(0.0, 2.0)] {
        let at = |w: Complex64| -> Result<Complex64> { Ok(theta_eval(&spec, &SiegelPoint::scalar(w.re, w.im)?, EPS)?.value) };
        let lhs = at(-z.inv())?;
        let rhs = z.powi(4) * at(z)?;
        worst = worst.max(rel(lhs, rhs));
    }
    let e8_worst = worst;
    let f = form("diag:2,2");
    let spec = unit_spec(&f, 2, q_zeros(2, 2), q_zeros(2, 2))?;
    let mut cosets = 0;
    for z in [SiegelPoint::i_identity(2), random_siegel(&mut rng(404), 2, 0.8)] {
        let rep = check_inversion(&spec, &z, EPS)?;
        cosets = rep.metadata["cosets"].as_u64().unwrap_or(0);
        worst = worst.max(rep.residual);
    }
    outcome(
        worst <= INVERSION_TOL && cosets == 16,
        format!("E8 z⁴ law worst {e8_worst:e}; 2I₂ genus 2 with {cosets} cosets, overall worst {worst:e}"),
    )
}

fn criterion_5() -> Result<Outcome> {
    let one = ExactPoly::one(2, 1);
    let u0 = ExactPoly::var(2, 1, 0, 0)?;
    let cases: Vec<(&str, ThetaSpec, u64)> = vec![
        ("diag(2,-2) (0,0)", indef_spec(&form("diag:2,-2"), &one, &one, q_zeros(2, 1), q_zeros(2, 1))?, 4),
        ("H2 (1,0)", indef_spec(&form("h2"), &u0, &one, q_zeros(2, 1), q_zeros(2, 1))?, 1),
    ];
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for (label, spec, expected) in &cases {
        for (x, y) in [(0.0, 1.0), (0.25, 1.0)] {
            let rep = check_inversion(spec, &SiegelPoint::scalar(x, y)?, EPS)?;
            let cosets = rep.metadata["cosets"].as_u64().unwrap_or(0);
            if cosets != *expected {
                notes.push(format!("{label}: {cosets} cosets"));
            }
            worst = worst.max(rep.residual);
        }
    }
    outcome(worst <= INVERSION_TOL && notes.is_empty(), format!("worst residual {worst:e} {}", notes.join("; ")))
}

fn criterion_6() -> Result<Outcome> {
    let opts = SuiteOptions { form: None, genus: None, seed: 1 };
    let mut reports = run_suite(Suite::Fourier, &opts);
    reports.extend(run_suite(Suite::Poisson, &opts));
    let mut failures = Vec::new();
    let mut worst = [0.0f64; 3];
    for rep in &reports {
        let (slot, tol) = match rep.name.as_str() {
            "gauss_transform" => (0, GAUSS_TOL),
            "poisson" => (2, POISSON_TOL),
            _ => (1, FOURIER_TOL),
        };
        worst[slot] = worst[slot].max(rep.residual);
        if !(rep.residual <= tol) {
            failures.push(rep.metadata.get("case").map(|c| c.to_string()).unwrap_or_else(|| rep.name.clone()));
        }
    }
    // Σ exp(−2πu²) from both sides of Poisson summation against the direct sum
    let direct: f64 = (-20i64..=20).map(|u| (-2.0 * PI * (u * u) as f64).exp()).sum();
    let spec = posdef_spec(&form("diag:2"), &ExactPoly::one(1, 1), q_zeros(1, 1), q_zeros(1, 1))?;
    let rep = siegel_theta::verify::check_poisson(&spec, &SiegelPoint::i_identity(1), EPS)?;
    let side = |v: &serde_json::Value| Complex64::new(v[0].as_f64().unwrap_or(f64::NAN), v[1].as_f64().unwrap_or(f64::NAN));
    let (lhs, rhs) = (side(&rep.lhs), side(&rep.rhs));
    let value_ok = (lhs.re - direct).abs() <= POISSON_TOL
        && (rhs.re - direct).abs() <= POISSON_TOL
        && lhs.im.abs() <= POISSON_TOL
        && rhs.im.abs() <= POISSON_TOL
        && format!("{direct:.7}") == "1.0037349";
    outcome(
        failures.is_empty() && value_ok,
        format!(
            "{} reports, worst gauss {:e} fourier {:e} poisson {:e}; Σexp(−2πu²) = {direct:.10}, sides {:.10} / {:.10}{}",
            reports.len(),
            worst[0],
            worst[1],
            worst[2],
            lhs.re,
            rhs.re,
            if failures.is_empty() { String::new() } else { format!("; failed {failures:?}") }
        ),
    )
}

fn criterion_7() -> Result<Outcome> {
    let mut r = rng(707);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for name in ["diag:2,-2", "h2", "diag:2,2,-2"] {
        let f = form(name);
        let m = f.dim();
        for n in [1usize, 2] {
            let points = [SiegelPoint::i_identity(n), random_siegel(&mut r, n, 0.8)];
            for alpha in 0..=1u32 {
                for beta in 0..=1u32 {
                    let pa = basis_homopol(m, n, alpha)?.remove(0);
                    let pb = basis_homopol(m, n, beta)?.remove(0);
                    for hl in ["zero", "half"] {
                        let h = characteristic(hl, m, n);
                        let spec = indef_spec(&f, &pa, &pb, h.clone(), h)?;
                        for z in &points {
                            let a = theta_eval(&spec, z, 1e-15)?.value;
                            let b = theta_eval_borcherds(&spec, z, 1e-15)?.value * borcherds_normalization(&spec, z);
                            worst = worst.max(rel(a, b));
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(worst <= CROSS_TOL, format!("{count} evaluations, worst relative difference {worst:e}"))
}

fn criterion_8() -> Result<Outcome> {
    let mut r = rng(808);
    let mut mismatches = 0;
    let mut total_points = 0;
    for _ in 0..50 {
        let (m, n) = loop {
            let (m, n) = (r.gen_range(1..=4usize), r.gen_range(1..=4usize));
            if m * n <= 4 {
                break (m, n);
            }
        };
        let dim = m * n;
        let g = random_siegel(&mut r, dim, 0.3).y().clone();
        let center: Vec<f64> = (0..dim).map(|_| r.gen_range(-0.5..0.5)).collect();
        let bound = r.gen_range(0.5..6.0);
        let mut found = lattice_points(&g, &center, bound)?;
        found.sort();
        let lmin = g.symmetric_eigenvalues().min();
        let b = ((bound / lmin).sqrt() + 1.0).ceil() as i64;
        let mut scan = Vec::new();
        let mut v = vec![-b; dim];
        'odometer: loop {
            let x = DMatrix::from_fn(dim, 1, |i, _| v[i] as f64 + center[i]);
            if (x.transpose() * &g * &x)[(0, 0)] <= bound {
                scan.push(v.clone());
            }
            for i in 0..dim {
                if v[i] < b {
                    v[i] += 1;
                    continue 'odometer;
                }
                v[i] = -b;
            }
            break;
        }
        scan.sort();
        total_points += scan.len();
        if found != scan {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("50 instances, {total_points} points, {mismatches} mismatches"))
}

fn criterion_9() -> Result<Outcome> {
    let e8 = form("e8");
    let p = isotropic_square(&e8, 0, 2)?;
    let ainv = inverse_form::<Coeff>(&e8.to_q())?;
    let harmonic = siegel_theta::polyalg::trace_laplace(&p, &ainv)?.is_zero();
    let mut h = q_zeros(8, 1);
    h[0][0] = q(1, 2);
    let spec = posdef_spec(&e8, &p, h, q_zeros(8, 1))?;
    let mut r = rng(909);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let z = random_siegel(&mut r, 1, 0.8);
        worst = worst.max(check_holomorphy(&spec, &z, FD_STEP, 1e-14)?.residual);
    }
    outcome(harmonic && worst <= HOLOMORPHY_TOL, format!("trΔ P = 0: {harmonic}; worst ∂̄ estimate {worst:e}"))
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let results = [
        run(1, "commutator identity, exact", secs(60), criterion_1),
        run(2, "solution spaces, exact", secs(300), criterion_2),
        run(3, "translation law", secs(120), criterion_3),
        run(4, "inversion law, definite", secs(300), criterion_4),
        run(5, "inversion law, indefinite", secs(120), criterion_5),
        run(6, "Fourier, Gauss and Poisson", secs(120), criterion_6),
        run(7, "direct versus Borcherds evaluation", None, criterion_7),
        run(8, "enumeration versus box scan", None, criterion_8),
        run(9, "holomorphy of harmonic E8 series", None, criterion_9),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}

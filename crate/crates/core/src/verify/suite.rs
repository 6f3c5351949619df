//! Seeded verification suites over fixture grids.

use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::fourier::{check_fourier, check_fourier_general, check_gauss_transform, check_poisson};
use super::holomorphy::{check_holomorphy, isotropic_square, FD_STEP};
use super::laws::{check_inversion, check_translation, check_vigneras};
use super::operators::{
    check_commutator, check_exp_rules, check_homogeneity, check_laplace_symmetry, check_lift_equivalence,
    check_negative_solution, check_transfer,
};
use super::random::{random_invertible, random_poly, random_siegel, random_symmetric, rng};
use super::report::CheckReport;
use crate::error::{Error, Result};
use crate::linalg::{q, q_zeros, QMat};
use crate::polyalg::{basis_homopol, ExactPoly, MatPoly};
use crate::quadform::{decompose, QuadForm};
use crate::siegel::SiegelPoint;
use crate::theta::spec::{build_g_indef, indef_spec, posdef_spec};
use crate::theta::ThetaSpec;

pub const SUITE_EPS: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Operators,
    Translation,
    Inversion,
    Fourier,
    Poisson,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "operators" => Suite::Operators,
            "translation" => Suite::Translation,
            "inversion" => Suite::Inversion,
            "fourier" => Suite::Fourier,
            "poisson" => Suite::Poisson,
            "all" => Suite::All,
            _ => return Err(Error::Invalid(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub form: Option<QuadForm>,
    pub genus: Option<usize>,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { form: None, genus: None, seed: 1 }
    }
}

type Job = Box<dyn Fn() -> Result<Vec<CheckReport>> + Send + Sync>;

fn one(name: String, f: impl Fn() -> Result<CheckReport> + Send + Sync + 'static) -> (String, Job) {
    (name, Box::new(move || Ok(vec![f()?])))
}

/// `½` where `a + i` is even, `0` elsewhere.
pub fn half_pattern(m: usize, n: usize) -> QMat {
    (0..m).map(|a| (0..n).map(|i| if (a + i) % 2 == 0 { q(1, 2) } else { q(0, 1) }).collect()).collect()
}

/// Constant coefficient: `P = 1` for definite forms, `α = β = 0` otherwise.
pub fn unit_spec(form: &QuadForm, n: usize, h: QMat, k: QMat) -> Result<ThetaSpec> {
    let one = ExactPoly::one(form.dim(), n);
    if decompose(form)?.is_definite() && form.matrix()[0][0] > 0 {
        posdef_spec(form, &one, h, k)
    } else {
        indef_spec(form, &one, &one, h, k)
    }
}

fn chars(label: &str, m: usize, n: usize) -> QMat {
    if label == "half" {
        half_pattern(m, n)
    } else {
        q_zeros(m, n)
    }
}

fn form(name: &str) -> QuadForm {
    QuadForm::from_name(name).expect("fixture name")
}

fn random_s(r: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    loop {
        let s = random_symmetric(r, n, 2);
        if s.iter().flatten().any(|&x| x != 0) {
            return s;
        }
    }
}

fn operator_jobs(opts: &SuiteOptions, r: &mut ChaCha8Rng) -> Vec<(String, Job)> {
    let mut jobs = Vec::new();
    let shapes: Vec<(usize, usize)> = match &opts.form {
        Some(f) => vec![(f.dim(), opts.genus.unwrap_or(1))],
        None => vec![(2, 1), (2, 2), (3, 2)],
    };
    for &(m, n) in &shapes {
        let seed = r.gen::<u64>();
        let degree = if m * n > 6 { 4 } else { 6 };
        jobs.push(one(format!("commutator m={m} n={n}"), move || {
            check_commutator(&mut rng(seed), (m, n), degree, 20, 3, 5)
        }));
    }
    let forms: Vec<QuadForm> = match &opts.form {
        Some(f) => vec![f.clone()],
        None => vec![form("diag:2,2"), form("diag:2,-2"), form("h2")],
    };
    let n = opts.genus.unwrap_or(1);
    for f in forms {
        let m = f.dim();
        let p = random_poly(r, m, n, 4, 5);
        let nmat = random_invertible(r, n, 2);
        let mmat = random_invertible(r, m, 2);
        let label = format!("{m}x{n}");
        let (f1, p1) = (f.clone(), p.clone());
        jobs.push((format!("exp rules {label}"), Box::new(move || check_exp_rules(&p1, &f1.to_q(), &nmat, &mmat))));
        let f2 = f.clone();
        jobs.push(one(format!("laplace symmetry {label}"), move || check_laplace_symmetry(&p, &f2.to_q())));
        let definite = decompose(&f).map(|d| d.is_definite()).unwrap_or(false) && f.matrix()[0][0] > 0;
        for alpha in 0..=2u32 {
            let basis = match basis_homopol(m, n, alpha) {
                Ok(b) => b,
                Err(_) => continue,
            };
            let nm = random_invertible(r, n, 2);
            for (idx, b) in basis.into_iter().enumerate().take(4) {
                let (b1, nm1) = (b.clone(), nm.clone());
                jobs.push(one(format!("homogeneity α={alpha} #{idx}"), move || check_homogeneity(&b1, &nm1, alpha)));
                if definite {
                    let f3 = f.clone();
                    jobs.push(one(format!("lift α={alpha} #{idx}"), move || check_lift_equivalence(&b, &f3, alpha)));
                } else if alpha <= 1 {
                    let b2 = b.clone();
                    jobs.push(one(format!("negative part β={alpha} #{idx}"), move || check_negative_solution(&b2, alpha)));
                }
            }
        }
        if !definite {
            let f4 = f.clone();
            jobs.push((
                format!("indefinite eigen-equation {label}"),
                Box::new(move || {
                    let dec = decompose(&f4)?;
                    let mut out = Vec::new();
                    for alpha in 0..=1u32 {
                        for beta in 0..=1u32 {
                            let pa = basis_homopol(m, n, alpha)?.remove(0);
                            let pb = basis_homopol(m, n, beta)?.remove(0);
                            let g = build_g_indef(&pa, &pb, &dec)?;
                            let (_, s) = dec.signature();
                            out.push(check_vigneras(&g, &f4, alpha as i64 - beta as i64 - s as i64)?);
                        }
                    }
                    Ok(out)
                }),
            ));
        }
    }
    let p = random_poly(r, 2, 2, 4, 6);
    let sinv: QMat = (0..2).map(|_| (0..2).map(|_| q(r.gen_range(-3..=3), r.gen_range(1..=3))).collect()).collect();
    jobs.push(one("sylvester transfer".into(), move || {
        if crate::linalg::rank(&sinv) < 2 {
            return check_transfer(&p, &vec![vec![q(1, 1), q(1, 2)], vec![q(0, 1), q(2, 1)]], &[1, -1]);
        }
        check_transfer(&p, &sinv, &[1, -1])
    }));
    jobs
}

fn law_forms(opts: &SuiteOptions, defaults: &[&str]) -> Vec<(String, QuadForm)> {
    match &opts.form {
        Some(f) => vec![("form".into(), f.clone())],
        None => defaults.iter().map(|s| (s.to_string(), form(s))).collect(),
    }
}

fn translation_jobs(opts: &SuiteOptions, r: &mut ChaCha8Rng) -> Vec<(String, Job)> {
    let mut jobs = Vec::new();
    let genera = opts.genus.map(|g| vec![g]).unwrap_or(vec![1, 2]);
    for (name, f) in law_forms(opts, &["diag:2", "e8", "diag:2,-2"]) {
        for &n in &genera {
            let y_min = match f.dim() * n {
                d if d >= 16 => 2.5,
                d if d > 8 => 1.5,
                _ => 0.8,
            };
            for hl in ["zero", "half"] {
                for kl in ["zero", "half"] {
                    for t in 0..2 {
                        let s = random_s(r, n);
                        let z = random_siegel(r, n, y_min);
                        let f1 = f.clone();
                        jobs.push(one(format!("translation {name} n={n} H={hl} K={kl} #{t}"), move || {
                            let m = f1.dim();
                            let spec = unit_spec(&f1, n, chars(hl, m, n), chars(kl, m, n))?;
                            check_translation(&spec, &z, &s, SUITE_EPS)
                        }));
                    }
                }
            }
        }
    }
    jobs
}

fn inversion_jobs(opts: &SuiteOptions, r: &mut ChaCha8Rng) -> Vec<(String, Job)> {
    let mut jobs = Vec::new();
    let genera = opts.genus.map(|g| vec![g]).unwrap_or(vec![1]);
    for (name, f) in law_forms(opts, &["diag:2", "diag:2,-2", "h2"]) {
        for &n in &genera {
            let y_min = if f.dim() * n > 8 { 1.0 } else { 0.8 };
            let points = vec![("iI".to_string(), SiegelPoint::i_identity(n)), ("random".to_string(), random_siegel(r, n, y_min))];
            for (zl, z) in points {
                for hl in ["zero", "half"] {
                    let f1 = f.clone();
                    let z1 = z.clone();
                    jobs.push(one(format!("inversion {name} n={n} Z={zl} H=K={hl}"), move || {
                        let m = f1.dim();
                        let spec = unit_spec(&f1, n, chars(hl, m, n), chars(hl, m, n))?;
                        check_inversion(&spec, &z1, SUITE_EPS)
                    }));
                }
            }
        }
    }
    jobs
}

fn var(m: usize, n: usize, a: usize, i: usize) -> ExactPoly {
    MatPoly::var(m, n, a, i).expect("index in range")
}

fn fourier_jobs(opts: &SuiteOptions, r: &mut ChaCha8Rng) -> Vec<(String, Job)> {
    let mut jobs = Vec::new();
    let u = var(1, 1, 0, 0);
    let polys = vec![("1", ExactPoly::one(1, 1)), ("u", u.clone()), ("u²+u", u.mul(&u).add(&u))];
    let points = [SiegelPoint::i_identity(1), SiegelPoint::scalar(0.3, 1.1).expect("valid point")];
    for (pl, p) in &polys {
        for (zi, z) in points.iter().enumerate() {
            for v in [0.0, 0.37] {
                let (p1, z1) = (p.clone(), z.clone());
                jobs.push(one(format!("fourier general [[2]] p={pl} z#{zi} v={v}"), move || {
                    check_fourier_general(&form("diag:2"), &p1, &z1, &DMatrix::from_element(1, 1, v))
                }));
            }
        }
    }
    let mut specs: Vec<(String, ThetaSpec)> = Vec::new();
    let zero = |m, n| q_zeros(m, n);
    if let Ok(s) = posdef_spec(&form("diag:2"), &u, zero(1, 1), zero(1, 1)) {
        specs.push(("[[2]] P=u".into(), s));
    }
    if let Ok(s) = posdef_spec(&form("diag:2"), &ExactPoly::one(1, 2), zero(1, 2), zero(1, 2)) {
        specs.push(("[[2]] n=2".into(), s));
    }
    if let Ok(s) = unit_spec(&form("diag:2,-2"), 1, zero(2, 1), zero(2, 1)) {
        specs.push(("diag(2,-2)".into(), s));
    }
    if let Ok(s) = indef_spec(&form("h2"), &var(2, 1, 0, 0), &ExactPoly::one(2, 1), zero(2, 1), zero(2, 1)) {
        specs.push(("h2 (1,0)".into(), s));
    }
    if let Some(f) = &opts.form {
        let n = opts.genus.unwrap_or(1);
        if f.dim() * n <= 2 {
            if let Ok(s) = unit_spec(f, n, zero(f.dim(), n), zero(f.dim(), n)) {
                specs.push(("form".into(), s));
            }
        }
    }
    for (label, spec) in specs {
        let (m, n) = spec.shape();
        let z = random_siegel(r, n, 0.8);
        let v = DMatrix::from_fn(m, n, |_, _| r.gen_range(-0.5..0.5));
        jobs.push(one(format!("fourier {label}"), move || check_fourier(&spec, &z, &v)));
    }
    let gauss = vec![
        ("1".to_string(), ExactPoly::one(1, 1)),
        ("u²".to_string(), u.mul(&u)),
        ("u²+3u".to_string(), u.mul(&u).add(&u.scale(&crate::polyalg::Coeff::rational(q(3, 1))))),
        ("2x1 random".to_string(), random_poly(r, 2, 1, 4, 5)),
        ("1x2 random".to_string(), random_poly(r, 1, 2, 4, 5)),
    ];
    for (label, p) in gauss {
        let (m, n) = p.shape();
        let v = DMatrix::from_fn(m, n, |_, _| r.gen_range(-1.0..1.0));
        jobs.push(one(format!("gauss transform p={label}"), move || check_gauss_transform(&p, &v)));
    }
    jobs
}

fn poisson_jobs(opts: &SuiteOptions, r: &mut ChaCha8Rng) -> Vec<(String, Job)> {
    let mut jobs = Vec::new();
    let u = var(1, 1, 0, 0);
    let zero = |m, n| q_zeros(m, n);
    let mut specs: Vec<(String, Result<ThetaSpec>)> = vec![
        ("[[2]]".into(), posdef_spec(&form("diag:2"), &ExactPoly::one(1, 1), zero(1, 1), zero(1, 1))),
        ("[[1]]".into(), posdef_spec(&form("diag:1"), &ExactPoly::one(1, 1), zero(1, 1), zero(1, 1))),
        ("[[2]] P=u".into(), posdef_spec(&form("diag:2"), &u, zero(1, 1), zero(1, 1))),
        ("diag(2,-2)".into(), unit_spec(&form("diag:2,-2"), 1, zero(2, 1), zero(2, 1))),
        ("h2 (1,0)".into(), indef_spec(&form("h2"), &var(2, 1, 0, 0), &ExactPoly::one(2, 1), zero(2, 1), zero(2, 1))),
    ];
    if let Some(f) = &opts.form {
        let n = opts.genus.unwrap_or(1);
        specs.push(("form".into(), unit_spec(f, n, zero(f.dim(), n), zero(f.dim(), n))));
    }
    for (label, spec) in specs {
        let n = spec.as_ref().map(|s| s.genus()).unwrap_or(1);
        let points = vec![SiegelPoint::i_identity(n), random_siegel(r, n, 0.8)];
        for (zi, z) in points.into_iter().enumerate() {
            let spec = spec.clone();
            jobs.push(one(format!("poisson {label} z#{zi}"), move || check_poisson(&spec.clone()?, &z, SUITE_EPS)));
        }
    }
    jobs
}

fn holomorphy_jobs(opts: &SuiteOptions, r: &mut ChaCha8Rng) -> Vec<(String, Job)> {
    let f = match &opts.form {
        Some(f) => f.clone(),
        None => form("e8"),
    };
    if opts.genus.unwrap_or(1) != 1 {
        return Vec::new();
    }
    // an isotropic pair needs A_aa = A_bb and A_ab = 0
    let m = f.dim();
    let pair = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).find(|&(a, b)| {
        f.entry(a, a) == f.entry(b, b) && f.entry(a, b) == 0
    });
    let definite = decompose(&f).map(|d| d.is_definite()).unwrap_or(false) && f.entry(0, 0) > 0;
    let (a, b) = match pair {
        Some(p) if definite => p,
        _ => return Vec::new(),
    };
    let z = random_siegel(r, 1, 0.8);
    let mut h = q_zeros(m, 1);
    h[0][0] = q(1, 2);
    vec![one("holomorphy harmonic".into(), move || {
        let p = isotropic_square(&f, a, b)?;
        let spec = posdef_spec(&f, &p, h.clone(), q_zeros(m, 1))?;
        check_holomorphy(&spec, &z, FD_STEP, 1e-14)
    })]
}

/// Runs a suite. Failing computations become failed reports rather than errors.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Vec<CheckReport> {
    let mut r = rng(opts.seed);
    let mut jobs: Vec<(String, Job)> = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Operators {
        jobs.extend(operator_jobs(opts, &mut r));
    }
    if all || suite == Suite::Translation {
        jobs.extend(translation_jobs(opts, &mut r));
    }
    if all || suite == Suite::Inversion {
        jobs.extend(inversion_jobs(opts, &mut r));
    }
    if all || suite == Suite::Fourier {
        jobs.extend(fourier_jobs(opts, &mut r));
    }
    if all || suite == Suite::Poisson {
        jobs.extend(poisson_jobs(opts, &mut r));
    }
    if all {
        jobs.extend(holomorphy_jobs(opts, &mut r));
    }
    jobs.par_iter()
        .map(|(case, job)| match job() {
            Ok(reports) => reports.into_iter().map(|rep| rep.with("case", json!(case))).collect(),
            Err(e) => vec![CheckReport::error(case.clone(), &e).with("case", json!(case))],
        })
        .collect::<Vec<Vec<CheckReport>>>()
        .into_iter()
        .flatten()
        .collect()
}

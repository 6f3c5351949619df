use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use siegel_theta::linalg::{q, q_identity, q_zeros};
use siegel_theta::polyalg::ops::ring_matrix;
use siegel_theta::polyalg::{Coeff, ExactPoly};
use siegel_theta::quadform::QuadForm;
use siegel_theta::siegel::SiegelPoint;
use siegel_theta::theta::{posdef_spec, theta_eval, SpecFile};
use siegel_theta::verify::laws::{check_inversion, check_translation};
use siegel_theta::verify::random::{random_siegel, random_symmetric, rng};
use siegel_theta::verify::suite::unit_spec;

/// `E_4(τ) = 1 + 240 Σ σ₃(n) qⁿ`.
fn eisenstein_e4(tau: Complex64) -> Complex64 {
    let qn = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
    let mut acc = Complex64::new(1.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for n in 1..400u64 {
        power *= qn;
        let sigma3: u64 = (1..=n).filter(|d| n % d == 0).map(|d| d * d * d).sum();
        acc += power * (240.0 * sigma3 as f64);
        if power.norm() < 1e-30 {
            break;
        }
    }
    acc
}

#[test]
fn e8_theta_is_e4() {
    let e8 = QuadForm::from_name("e8").unwrap();
    let spec = unit_spec(&e8, 1, q_zeros(8, 1), q_zeros(8, 1)).unwrap();
    for (x, y) in [(0.0, 1.0), (0.2, 0.8), (-0.37, 1.3)] {
        let v = theta_eval(&spec, &SiegelPoint::scalar(x, y).unwrap(), 1e-13).unwrap();
        let e4 = eisenstein_e4(Complex64::new(x, y));
        assert!((v.value - e4).norm() <= 1e-10 * e4.norm(), "{x}+{y}i: {} vs {e4}", v.value);
    }
}

#[test]
fn one_variable_series_matches_direct_sum() {
    let text = r#"{"A":[[2]],"coeff":{"type":"posdef"},"Z":{"X":[[0.3]],"Y":[[0.7]]}}"#;
    let (spec, z) = SpecFile::parse(text).unwrap().build().unwrap();
    let v = theta_eval(&spec, &z, 1e-14).unwrap();
    let tau = Complex64::new(0.3, 0.7);
    let direct: Complex64 =
        (-30i64..=30).map(|u| (Complex64::new(0.0, PI) * tau * (2 * u * u) as f64).exp()).sum();
    assert!((v.value - direct).norm() <= 1e-13);
}

#[test]
fn odd_coefficient_without_characteristic_vanishes() {
    let f = QuadForm::from_name("diag:2,2").unwrap();
    let lin = ExactPoly::var(2, 1, 0, 0).unwrap();
    let spec = posdef_spec(&f, &lin, q_zeros(2, 1), q_zeros(2, 1)).unwrap();
    let v = theta_eval(&spec, &SiegelPoint::scalar(0.15, 0.6).unwrap(), 1e-13).unwrap();
    assert!(v.value.norm() <= 1e-13, "{}", v.value);
}

#[test]
fn negating_summation_variable() {
    // θ_{H,K,P} = θ_{−H,−K,P(−U)}
    let f = QuadForm::from_name("diag:2,2").unwrap();
    let (u0, u1) = (ExactPoly::var(2, 1, 0, 0).unwrap(), ExactPoly::var(2, 1, 1, 0).unwrap());
    let p = u0.pow(3).add(&u0.mul(&u1.pow(2)).scale(&Coeff::rational(q(2, 1))));
    let minus_p = p.substitute_linear(
        &ring_matrix::<Coeff>(&vec![vec![q(-1, 1), q(0, 1)], vec![q(0, 1), q(-1, 1)]]),
        &ring_matrix::<Coeff>(&q_identity(1)),
    ).unwrap();
    let h = vec![vec![q(1, 2)], vec![q(1, 3)]];
    let k = vec![vec![q(1, 4)], vec![q(0, 1)]];
    let neg_h: Vec<Vec<_>> = h.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    let neg_k: Vec<Vec<_>> = k.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    let z = SiegelPoint::scalar(0.1, 0.7).unwrap();
    let a = theta_eval(&posdef_spec(&f, &p, h, k).unwrap(), &z, 1e-13).unwrap().value;
    let b = theta_eval(&posdef_spec(&f, &minus_p, neg_h, neg_k).unwrap(), &z, 1e-13).unwrap().value;
    assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0), "{a} vs {b}");
    assert!(a.norm() > 1e-3);
}

#[test]
fn halving_eps_converges() {
    let f = QuadForm::from_name("h2").unwrap();
    let spec = unit_spec(&f, 1, q_zeros(2, 1), q_zeros(2, 1)).unwrap();
    let z = SiegelPoint::scalar(0.25, 1.0).unwrap();
    let mut prev = theta_eval(&spec, &z, 1e-4).unwrap();
    let mut eps = 1e-4;
    while eps > 1e-13 {
        let next = theta_eval(&spec, &z, eps / 2.0).unwrap();
        assert!(next.tail_bound <= eps / 2.0);
        assert!(next.terms_used >= prev.terms_used);
        assert!((next.value - prev.value).norm() <= 1.5 * eps + 1e-15);
        prev = next;
        eps /= 2.0;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn translation_law_at_random_points(seed in any::<u64>(), name in prop::sample::select(vec!["diag:2", "diag:2,-2", "h2"])) {
        let f = QuadForm::from_name(name).unwrap();
        let m = f.dim();
        let mut r = rng(seed);
        let s = random_symmetric(&mut r, 1, 3);
        let h: Vec<Vec<_>> = (0..m).map(|a| vec![q(a as i64 + 1, 2 * m as i64 + 1)]).collect();
        let spec = unit_spec(&f, 1, h.clone(), h).unwrap();
        let z = random_siegel(&mut r, 1, 0.8);
        let rep = check_translation(&spec, &z, &s, 1e-13).unwrap();
        prop_assert!(rep.passed, "{:?}", rep);
    }

    #[test]
    fn inversion_law_holds_at_point_and_its_image(seed in any::<u64>(), name in prop::sample::select(vec!["diag:2", "h2"])) {
        let f = QuadForm::from_name(name).unwrap();
        let spec = unit_spec(&f, 1, q_zeros(f.dim(), 1), q_zeros(f.dim(), 1)).unwrap();
        let z = random_siegel(&mut rng(seed), 1, 0.8);
        let there = check_inversion(&spec, &z, 1e-13).unwrap();
        prop_assert!(there.passed, "{:?}", there);
        let back = check_inversion(&spec, &z.neg_inverse().unwrap(), 1e-13).unwrap();
        prop_assert!(back.passed, "{:?}", back);
    }
}

#[test]
fn value_independent_of_thread_count() {
    let f = QuadForm::from_name("diag:2,2,-2").unwrap();
    let spec = unit_spec(&f, 2, q_zeros(3, 2), q_zeros(3, 2)).unwrap();
    let z = random_siegel(&mut rng(11), 2, 0.8);
    let eval = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| theta_eval(&spec, &z, 1e-12).unwrap())
    };
    let (a, b) = (eval(1), eval(3));
    assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
    assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
    assert_eq!(a.terms_used, b.terms_used);
}

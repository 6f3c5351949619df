use std::collections::HashSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

use siegel_theta::linalg::{int_det, int_to_f64, q_from_int, q_mul};
use siegel_theta::quadform::enumerate::lattice_points;
use siegel_theta::quadform::{coset_reps, decompose, QuadForm};
use siegel_theta::siegel::det_power;
use siegel_theta::verify::random::{random_siegel, random_symmetric_invertible, rng};

fn random_form(seed: u64, m: usize) -> QuadForm {
    QuadForm::new(random_symmetric_invertible(&mut rng(seed), m, 3)).unwrap()
}

fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decomposition_invariants(seed in any::<u64>(), m in 1usize..=4) {
        let form = random_form(seed, m);
        let a = int_to_f64(form.matrix());
        let d = decompose(&form).unwrap();
        let scale = a.amax().max(1.0);
        prop_assert!(max_diff(&(d.aplus() + d.aminus()), &a) <= 1e-9 * scale);
        prop_assert!(max_diff(&(d.aplus() - d.aminus()), d.majorant()) <= 1e-9 * scale);
        // majorant: M A⁻¹ M = A, M > 0
        let ainv = a.clone().try_inverse().unwrap();
        prop_assert!(max_diff(&(d.majorant() * &ainv * d.majorant()), &a) <= 1e-8 * scale);
        prop_assert!(d.majorant().clone().cholesky().is_some());
        let p = d.proj_plus();
        prop_assert!(max_diff(&(p * p), p) <= 1e-9);
        let eig = a.symmetric_eigenvalues();
        let pos = eig.iter().filter(|&&x| x > 0.0).count();
        prop_assert_eq!(d.signature(), (pos, m - pos));
        if let Some(e) = d.exact() {
            let sum: Vec<Vec<BigRational>> = e.aplus.iter().zip(&e.aminus)
                .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect();
            prop_assert_eq!(sum, q_from_int(form.matrix()));
        }
    }

    #[test]
    fn enumeration_matches_box_scan(
        seed in any::<u64>(), c0 in -1.0f64..1.0, c1 in -1.0f64..1.0, bound in 0.5f64..12.0,
    ) {
        let mut r = rng(seed);
        let z = random_siegel(&mut r, 2, 0.3);
        let g = z.y().clone();
        let center = [c0, c1];
        let mut found: Vec<Vec<i64>> = lattice_points(&g, &center, bound).unwrap();
        found.sort();
        let lmin = g.symmetric_eigenvalues().min();
        let reach = (bound / lmin).sqrt().ceil() as i64 + 2;
        let mut scan = Vec::new();
        for a in -reach..=reach {
            for b in -reach..=reach {
                let v = [a as f64 + c0, b as f64 + c1];
                let q = g[(0, 0)] * v[0] * v[0] + 2.0 * g[(0, 1)] * v[0] * v[1] + g[(1, 1)] * v[1] * v[1];
                if q <= bound {
                    scan.push(vec![a, b]);
                }
            }
        }
        scan.sort();
        prop_assert_eq!(found, scan);
    }

    #[test]
    fn coset_representatives(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=2) {
        let form = random_form(seed, m);
        let det = int_det(form.matrix()).abs();
        let expected: u64 = num_traits::pow(det.clone(), n).try_into().unwrap();
        prop_assume!(expected <= 4096);
        let reps = coset_reps(&form, n).unwrap();
        prop_assert_eq!(reps.len() as u64, expected);
        let a = q_from_int(form.matrix());
        let mut seen = HashSet::new();
        for rep in &reps {
            // A·J is integral
            for row in q_mul(&a, &rep.j) {
                for x in row {
                    prop_assert!(x.is_integer());
                }
            }
            let key: Vec<BigRational> = rep.j.iter().flatten().map(|x| x - x.floor()).collect();
            prop_assert!(seen.insert(key), "duplicate class");
        }
    }

    #[test]
    fn determinant_powers_are_additive(seed in any::<u64>(), n in 1usize..=3, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let z = random_siegel(&mut rng(seed), n, 0.5);
        // W = −iZ has positive definite real part
        let w = z.z().map(|c| c * Complex64::new(0.0, -1.0));
        let lhs = det_power(&w, a).unwrap() * det_power(&w, b).unwrap();
        let rhs = det_power(&w, a + b).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
        let det = w.clone().determinant();
        prop_assert!((det_power(&w, 1.0).unwrap() - det).norm() <= 1e-10 * det.norm().max(1.0));
    }
}

#[test]
fn named_forms() {
    let e8 = QuadForm::from_name("e8").unwrap();
    assert!(e8.is_even() && e8.is_unimodular());
    assert_eq!(decompose(&e8).unwrap().signature(), (8, 0));
    let h2 = QuadForm::from_name("h2").unwrap();
    assert_eq!(decompose(&h2).unwrap().signature(), (1, 1));
    assert!(int_det(h2.matrix()).is_negative());
    assert_eq!(coset_reps(&QuadForm::from_name("diag:2,-2").unwrap(), 2).unwrap().len(), 16);
}

#[test]
fn singular_and_asymmetric_forms_rejected() {
    assert!(QuadForm::new(vec![vec![1, 2], vec![2, 4]]).is_err());
    assert!(QuadForm::new(vec![vec![1, 2], vec![3, 4]]).is_err());
}

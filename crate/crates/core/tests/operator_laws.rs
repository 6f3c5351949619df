use num_rational::BigRational;
use proptest::prelude::*;

use siegel_theta::linalg::{int_det, q_from_int, q_identity};
use siegel_theta::polyalg::ops::ring_matrix;
use siegel_theta::polyalg::{
    basis_homopol, euler_entry, exp_trace_laplace, inverse_form, laplace_entry, trace_laplace, Coeff, ExactPoly, Ring,
};
use siegel_theta::verify::random::{random_invertible, random_poly, random_symmetric_invertible, rng};

fn iterate_trace(p: &ExactPoly, ainv: &[Vec<Coeff>], k: usize) -> ExactPoly {
    (0..k).fold(p.clone(), |acc, _| trace_laplace(&acc, ainv).unwrap())
}

fn setup(seed: u64, m: usize, n: usize, d: u32) -> (ExactPoly, Vec<Vec<Coeff>>) {
    let mut r = rng(seed);
    let p = random_poly(&mut r, m, n, d, 6);
    let a = random_symmetric_invertible(&mut r, m, 3);
    (p, inverse_form::<Coeff>(&q_from_int(&a)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn euler_commutes_with_iterated_laplacian_up_to_lower_term(
        seed in any::<u64>(), m in 1usize..=3, n in 1usize..=2, k in 1usize..=3,
    ) {
        let (p, ainv) = setup(seed, m, n, 5);
        let lower = iterate_trace(&p, &ainv, k - 1);
        let upper = trace_laplace(&lower, &ainv).unwrap();
        for i in 0..n {
            for j in 0..n {
                let lhs = euler_entry(&upper, i, j).unwrap()
                    .sub(&iterate_trace(&euler_entry(&p, i, j).unwrap(), &ainv, k));
                let rhs = laplace_entry(&lower, &ainv, i, j).unwrap().scale(&Coeff::from_int(-2 * k as i64));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn laplacian_matrix_is_symmetric(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=3) {
        let (p, ainv) = setup(seed, m, n, 4);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(
                    laplace_entry(&p, &ainv, i, j).unwrap(),
                    laplace_entry(&p, &ainv, j, i).unwrap()
                );
            }
        }
    }

    #[test]
    fn heat_operator_is_a_one_parameter_group(
        seed in any::<u64>(), a in -4i64..=4, b in -4i64..=4, m in 1usize..=2, n in 1usize..=2,
    ) {
        let (p, ainv) = setup(seed, m, n, 4);
        let (ca, cb) = (Coeff::ratio_pi(a, 8, -1), Coeff::ratio_pi(b, 8, -1));
        let both = exp_trace_laplace(&exp_trace_laplace(&p, &ainv, &ca).unwrap(), &ainv, &cb).unwrap();
        prop_assert_eq!(both, exp_trace_laplace(&p, &ainv, &ca.add(&cb)).unwrap());
        let back = exp_trace_laplace(&exp_trace_laplace(&p, &ainv, &ca).unwrap(), &ainv, &ca.neg()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn basis_elements_transform_by_determinant_power(
        seed in any::<u64>(), m in 1usize..=3, n in 1usize..=2, alpha in 0u32..=2,
    ) {
        prop_assume!(m >= n || alpha == 0);
        let basis = basis_homopol(m, n, alpha).unwrap();
        let nmat = random_invertible(&mut rng(seed), n, 2);
        let det = BigRational::from_integer(int_det(&nmat));
        let factor = Coeff::rational(num_traits::pow(det, alpha as usize));
        let left = ring_matrix::<Coeff>(&q_identity(m));
        let right = ring_matrix::<Coeff>(&q_from_int(&nmat));
        for q in basis.iter().take(4) {
            prop_assert_eq!(q.substitute_linear(&left, &right).unwrap(), q.scale(&factor));
        }
    }
}

#[test]
fn determinant_basis_has_one_element_for_square_shape() {
    let b = basis_homopol(2, 2, 1).unwrap();
    assert_eq!(b.len(), 1);
    // det U = U₀₀U₁₁ − U₀₁U₁₀, variables row-major
    assert_eq!(b[0].num_terms(), 2);
}

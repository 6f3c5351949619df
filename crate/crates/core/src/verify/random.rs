//! Seeded random inputs for the verification suites.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::linalg::{int_det, q};
use crate::polyalg::{Coeff, ExactPoly};
use crate::siegel::SiegelPoint;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A polynomial with up to `max_terms` monomials of total degree `≤ d`
/// and small rational coefficients.
pub fn random_poly(rng: &mut ChaCha8Rng, m: usize, n: usize, d: u32, max_terms: usize) -> ExactPoly {
    let vars = m * n;
    let count = rng.gen_range(1..=max_terms);
    let mut p = ExactPoly::zero(m, n);
    for _ in 0..count {
        let deg = rng.gen_range(0..=d);
        let mut e = vec![0u32; vars];
        for _ in 0..deg {
            e[rng.gen_range(0..vars)] += 1;
        }
        let mut num = rng.gen_range(-5i64..=5);
        if num == 0 {
            num = 1;
        }
        let den = rng.gen_range(1i64..=3);
        p.add_term(e, Coeff::rational(q(num, den)));
    }
    p
}

/// Random invertible symmetric integer matrix with entries in `[−b, b]`.
pub fn random_symmetric_invertible(rng: &mut ChaCha8Rng, m: usize, b: i64) -> Vec<Vec<i64>> {
    loop {
        let a = random_symmetric(rng, m, b);
        if int_det(&a) != 0.into() {
            return a;
        }
    }
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, b: i64) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let x = rng.gen_range(-b..=b);
            a[i][j] = x;
            a[j][i] = x;
        }
    }
    a
}

/// Random invertible integer matrix (not necessarily symmetric).
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize, b: i64) -> Vec<Vec<i64>> {
    loop {
        let a: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-b..=b)).collect()).collect();
        if int_det(&a) != 0.into() {
            return a;
        }
    }
}

/// `X + iY` with `X` entries in `[−½, ½]` and `Y = y_min·I + RRᵀ/2`, `R` entries in `[−½, ½]`.
pub fn random_siegel(rng: &mut ChaCha8Rng, n: usize, y_min: f64) -> SiegelPoint {
    let mut x = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rng.gen_range(-0.5..=0.5);
            x[(i, j)] = v;
            x[(j, i)] = v;
        }
    }
    let r = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.5..=0.5));
    let y = DMatrix::identity(n, n) * y_min + &r * r.transpose() * 0.5;
    let y = (&y + y.transpose()) * 0.5;
    SiegelPoint::new(x, y).expect("constructed point lies in the upper half space")
}

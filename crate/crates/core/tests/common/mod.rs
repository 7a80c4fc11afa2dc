#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sarl::numerics::{orthonormal_range, Matrix, RankTolerance};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Random `rows x k` matrix with orthonormal columns.
pub fn random_stiefel(rows: usize, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let m = gaussian(rows, k, rng);
        let q = orthonormal_range(m.as_ref(), RankTolerance::default()).unwrap();
        if q.ncols() == k {
            return q;
        }
    }
}

/// One-hot labels drawn from `classes` categories.
pub fn random_one_hot(classes: usize, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut m = Matrix::zeros(classes, n);
    for j in 0..n {
        m[(rng.random_range(0..classes), j)] = 1.0;
    }
    m
}

/// A correlated `(x, y, s)` triple: `y` and `s` are noisy linear functions
/// of `x`.
pub fn random_problem_data(d: usize, p: usize, q: usize, n: usize, seed: u64) -> (Matrix, Matrix, Matrix) {
    let mut r = rng(seed);
    let x = gaussian(d, n, &mut r);
    let wy = gaussian(p, d, &mut r);
    let ws = gaussian(q, d, &mut r);
    let y = &wy * &x + gaussian(p, n, &mut r) * 0.5;
    let s = &ws * &x + gaussian(q, n, &mut r) * 0.5;
    (x, y, s)
}

pub fn trace_quadratic(b: &Matrix, g: &Matrix) -> f64 {
    let m = g.transpose() * b * g;
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

pub fn frob(m: &Matrix) -> f64 {
    m.norm_l2()
}

pub fn col(m: &Matrix, j: usize) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

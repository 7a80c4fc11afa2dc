mod common;

use common::*;
use sarl::data::gen_gaussian_mixture;
use sarl::eval::*;
use sarl::numerics::{center_columns, frobenius_sq, Matrix, RankTolerance};
use sarl::solver::*;
use sarl::SarlError;

#[test]
fn identity_and_constant_regressions() {
    let mut r = rng(1);
    let z = gaussian(3, 20, &mut r);
    let fit = fit_regressor(z.as_ref(), z.as_ref()).unwrap();
    assert!(fit.mse(z.as_ref(), z.as_ref()).unwrap() < 1e-20);
    assert!(frob(&(&fit.w - Matrix::identity(3, 3))) < 1e-12);
    assert!(fit.b.iter().all(|b| b.abs() < 1e-12));

    let t = gaussian(2, 20, &mut r);
    let zero = Matrix::zeros(3, 20);
    let fit = fit_regressor(zero.as_ref(), t.as_ref()).unwrap();
    let (tc, means) = center_columns(t.as_ref()).unwrap();
    assert_eq!(frob(&fit.w), 0.0);
    for (b, m) in fit.b.iter().zip(&means) {
        assert!((b - m).abs() < 1e-14);
    }
    let want = frobenius_sq(tc.as_ref()) / 20.0;
    assert!((fit.mse(zero.as_ref(), t.as_ref()).unwrap() - want).abs() < 1e-14);
}

#[test]
fn regressor_on_embedding_matches_objectives() {
    let (x, y, s) = random_problem_data(6, 3, 2, 150, 2);
    let p = build_problem_linear(x.as_ref(), y.as_ref(), s.as_ref(), RankTolerance::default()).unwrap();
    let sol = solve(&p, &SolverConfig::new(0.2).with_max_rank(3)).unwrap();
    assert_eq!(sol.encoder.dim(), 3);
    let z = sol.encoder.embed_batch(x.as_ref()).unwrap();
    let jy = fit_regressor(z.as_ref(), y.as_ref()).unwrap().mse(z.as_ref(), y.as_ref()).unwrap();
    let js = fit_regressor(z.as_ref(), s.as_ref()).unwrap().mse(z.as_ref(), s.as_ref()).unwrap();
    assert!((jy - sol.objectives.target_loss).abs() < 1e-9);
    assert!((js - sol.objectives.adversary_loss).abs() < 1e-9);
}

#[test]
fn regressor_matches_covariance_path() {
    let mut r = rng(3);
    let (x, y, s) = random_problem_data(4, 2, 1, 30, 3);
    let cov = CovarianceModel::from_data(x.as_ref(), y.as_ref(), s.as_ref(), RankTolerance::default()).unwrap();
    let theta = gaussian(2, 4, &mut r);
    let z = &theta * &x;
    let mse = fit_regressor(z.as_ref(), y.as_ref()).unwrap().mse(z.as_ref(), y.as_ref()).unwrap();
    let closed = min_mse_given_encoder(&cov, theta.as_ref(), Target::Target).unwrap();
    assert!((mse - closed).abs() < 1e-6);
}

#[test]
fn logistic_trivial_cases() {
    let z = Matrix::from_fn(1, 2, |_, j| j as f64);
    let clf = fit_logistic(z.as_ref(), &[0, 1], &LogisticHyper::default()).unwrap();
    assert_eq!(accuracy(&clf, z.as_ref(), &[0, 1]).unwrap(), 1.0);

    let mut r = rng(5);
    let z = gaussian(2, 10, &mut r);
    let labels = vec![1; 10];
    let clf = fit_logistic(z.as_ref(), &labels, &LogisticHyper::default()).unwrap();
    assert!(clf.degenerate);
    assert_eq!(accuracy(&clf, z.as_ref(), &labels).unwrap(), 1.0);
}

#[test]
fn softmax_rows_sum_to_one() {
    let mut r = rng(6);
    let z = gaussian(3, 50, &mut r);
    let labels: Vec<usize> = (0..50).map(|j| j % 3).collect();
    let clf = fit_logistic(z.as_ref(), &labels, &LogisticHyper::default()).unwrap();
    let p = clf.predict_proba(z.as_ref()).unwrap();
    for j in 0..50 {
        let sum: f64 = (0..p.nrows()).map(|i| p[(i, j)]).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
    let acc = accuracy(&clf, z.as_ref(), &labels).unwrap();
    assert!((0.0..=1.0).contains(&acc));
}

#[test]
fn logistic_rotation_invariance() {
    let mut r = rng(7);
    let z = gaussian(3, 80, &mut r);
    let labels: Vec<usize> = (0..80).map(|j| usize::from(z[(0, j)] + 0.5 * z[(2, j)] > 0.1)).collect();
    let rot = random_stiefel(3, 3, &mut r);
    let zr = &rot * &z;
    let hyper = LogisticHyper { l2: 0.0, ..LogisticHyper::default() };
    let a = fit_logistic(z.as_ref(), &labels, &hyper).unwrap();
    let b = fit_logistic(zr.as_ref(), &labels, &hyper).unwrap();
    let test = gaussian(3, 40, &mut r);
    let test_r = &rot * &test;
    let test_labels: Vec<usize> = (0..40).map(|j| j % 2).collect();
    let acc_a = accuracy(&a, test.as_ref(), &test_labels).unwrap();
    let acc_b = accuracy(&b, test_r.as_ref(), &test_labels).unwrap();
    assert!((acc_a - acc_b).abs() < 1e-9);
    let (pa, pb) = (a.predict_proba(test.as_ref()).unwrap(), b.predict_proba(test_r.as_ref()).unwrap());
    assert!(frob(&(pa - pb)) < 1e-9);
}

#[test]
fn metrics() {
    let z = Matrix::from_fn(1, 2, |_, j| j as f64);
    let clf = fit_logistic(z.as_ref(), &[0, 1], &LogisticHyper::default()).unwrap();
    assert!(matches!(accuracy(&clf, Matrix::zeros(1, 0).as_ref(), &[]), Err(SarlError::EmptyInput(_))));
    assert!(matches!(majority_prior(&[]), Err(SarlError::EmptyInput(_))));
    assert_eq!(majority_prior(&[0, 1, 1, 1]).unwrap(), 0.75);
    assert_eq!(delta_star(0.674, 0.674), 0.0);
    assert!((delta_star(0.809, 0.808) - 0.001).abs() < 1e-12);
    for p in [0.0, 0.3, 1.0] {
        assert_eq!(delta_star(p, p), 0.0);
    }
}

#[test]
fn invariant_embedding_hides_color() {
    let train = gen_gaussian_mixture(2000, 0).unwrap();
    let test = gen_gaussian_mixture(800, 1).unwrap();
    let p = build_problem_linear(train.x.as_ref(), train.y.as_ref(), train.s.as_ref(), RankTolerance::default()).unwrap();
    let sol = solve(&p, &SolverConfig::new(1.0)).unwrap();
    assert_eq!(sol.encoder.dim(), 0);
    let z_tr = sol.encoder.embed_batch(train.x.as_ref()).unwrap();
    let z_te = sol.encoder.embed_batch(test.x.as_ref()).unwrap();
    let clf = fit_logistic(z_tr.as_ref(), &train.sensitive_labels().unwrap(), &LogisticHyper::default()).unwrap();
    let acc = accuracy(&clf, z_te.as_ref(), &test.sensitive_labels().unwrap()).unwrap();
    assert!((acc - 0.5).abs() <= 0.03);
}

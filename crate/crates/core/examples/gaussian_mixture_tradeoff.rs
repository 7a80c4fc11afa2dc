//! Linear and RBF-kernel encoders on the four-blob mixture, scored by
//! logistic classifiers trained on the frozen embeddings.
//!
//!     cargo run --release --example gaussian_mixture_tradeoff

use sarl::data::{gen_gaussian_mixture, split, SplitSpec};
use sarl::eval::{accuracy, fit_logistic, LogisticHyper};
use sarl::kernels::{KernelModel, KernelSpec};
use sarl::numerics::RankTolerance;
use sarl::solver::{build_problem_kernel, build_problem_linear, solve, Problem, SolverConfig};

fn main() -> sarl::Result<()> {
    let data = gen_gaussian_mixture(5000, 7)?;
    let (train, test) = split(&data, SplitSpec { train_fraction: 0.8, seed: 7 })?;
    let tol = RankTolerance::default();

    let linear = build_problem_linear(train.x.as_ref(), train.y.as_ref(), train.s.as_ref(), tol)?;
    let model = KernelModel::fit(&KernelSpec::rbf_median(), train.x.as_ref())?;
    println!("rbf bandwidth {:.4}", model.resolved_bandwidth().unwrap());
    let kernel = build_problem_kernel(model, train.y.as_ref(), train.s.as_ref(), tol)?;

    let y_train = train.target_labels().unwrap();
    let s_train = train.sensitive_labels().unwrap();
    let y_test = test.target_labels().unwrap();
    let s_test = test.sensitive_labels().unwrap();

    println!("{:>7} {:>6} {:>3} {:>9} {:>9} {:>8} {:>8}", "mode", "lambda", "r", "J_y", "J_s", "acc_y", "acc_s");
    for (name, problem) in [("linear", &linear), ("rbf", &kernel)] {
        for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let row = score(problem, lambda, &train.x, &test.x, (&y_train, &s_train), (&y_test, &s_test))?;
            println!("{name:>7} {lambda:>6.2} {:>3} {:>9.5} {:>9.5} {:>8.4} {:>8.4}", row.0, row.1, row.2, row.3, row.4);
        }
    }
    Ok(())
}

type Labels<'a> = (&'a Vec<usize>, &'a Vec<usize>);

fn score(
    problem: &Problem,
    lambda: f64,
    x_train: &sarl::numerics::Matrix,
    x_test: &sarl::numerics::Matrix,
    train: Labels,
    test: Labels,
) -> sarl::Result<(usize, f64, f64, f64, f64)> {
    let sol = solve(problem, &SolverConfig::new(lambda))?;
    let z_train = sol.encoder.embed_batch(x_train.as_ref())?;
    let z_test = sol.encoder.embed_batch(x_test.as_ref())?;
    let hyper = LogisticHyper::default();
    let clf_y = fit_logistic(z_train.as_ref(), train.0, &hyper)?;
    let clf_s = fit_logistic(z_train.as_ref(), train.1, &hyper)?;
    Ok((
        sol.encoder.dim(),
        sol.objectives.target_loss,
        sol.objectives.adversary_loss,
        accuracy(&clf_y, z_test.as_ref(), test.0)?,
        accuracy(&clf_s, z_test.as_ref(), test.1)?,
    ))
}

//! Trade-off curve over an evenly spaced grid of weights, printed as CSV.
//!
//!     cargo run --release --example pareto_sweep -- 11

use sarl::data::gen_gaussian_mixture;
use sarl::numerics::RankTolerance;
use sarl::solver::{build_problem_linear, compute_bounds, lambda_grid, sweep_lambda, SolverConfig, DEFAULT_GRID_POINTS};

fn main() -> sarl::Result<()> {
    let points = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(DEFAULT_GRID_POINTS);
    let data = gen_gaussian_mixture(4000, 0)?;
    let tol = RankTolerance::default();
    let problem = build_problem_linear(data.x.as_ref(), data.y.as_ref(), data.s.as_ref(), tol)?;
    let b = compute_bounds(&problem, tol)?;
    eprintln!("gamma [{:.5}, {:.5}] alpha [{:.5}, {:.5}]", b.gamma_min, b.gamma_max, b.alpha_min, b.alpha_max);
    println!("lambda,r,target_loss,adversary_loss");
    for p in sweep_lambda(&problem, &lambda_grid(points), &SolverConfig::default())? {
        println!("{},{},{},{}", p.lambda, p.r, p.target_loss, p.adversary_loss);
    }
    Ok(())
}

//! Attainable loss ranges on the mixture, then the trade-off weight that
//! hits a chosen adversary loss.
//!
//!     cargo run --release --example bounds_and_bisection -- 0.45

use sarl::data::gen_gaussian_mixture;
use sarl::numerics::RankTolerance;
use sarl::solver::{bisect_alpha, build_problem_linear, compute_bounds, DEFAULT_MAX_ITER};

fn main() -> sarl::Result<()> {
    let data = gen_gaussian_mixture(4000, 0)?;
    let tol = RankTolerance::default();
    let problem = build_problem_linear(data.x.as_ref(), data.y.as_ref(), data.s.as_ref(), tol)?;
    let b = compute_bounds(&problem, tol)?;
    println!("target loss    [{:.5}, {:.5}]", b.gamma_min, b.gamma_max);
    println!("adversary loss [{:.5}, {:.5}]", b.alpha_min, b.alpha_max);

    let alpha = match std::env::args().nth(1) {
        Some(a) => a.parse().map_err(|_| sarl::SarlError::InvalidConfig(format!("not a number: {a}")))?,
        None => 0.5 * (b.alpha_min + b.alpha_max),
    };
    let out = bisect_alpha(&problem, alpha, 1e-3 * b.alpha_max, DEFAULT_MAX_ITER)?;
    for (k, (lambda, js)) in out.trace.iter().enumerate() {
        println!("  step {:>2}: lambda {lambda:.6} J_s {js:.6}", k + 1);
    }
    println!(
        "lambda {:.6} after {} steps: r {} J_y {:.5} J_s {:.5}",
        out.lambda,
        out.iterations,
        out.solution.encoder.dim(),
        out.solution.objectives.target_loss,
        out.solution.objectives.adversary_loss
    );
    Ok(())
}

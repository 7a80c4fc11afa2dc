//! A linear kernel reproduces the linear encoder; polynomial and RBF kernels
//! reach lower target loss at the same trade-off weight.
//!
//!     cargo run --release --example kernel_bridge

use sarl::data::gen_gaussian_mixture;
use sarl::kernels::{KernelModel, KernelSpec};
use sarl::numerics::RankTolerance;
use sarl::solver::{build_problem_kernel, build_problem_linear, solve, SolverConfig};

fn main() -> sarl::Result<()> {
    let data = gen_gaussian_mixture(1200, 1)?;
    let probe = gen_gaussian_mixture(8, 2)?;
    let tol = RankTolerance::default();
    let config = SolverConfig::new(0.5);

    let linear = build_problem_linear(data.x.as_ref(), data.y.as_ref(), data.s.as_ref(), tol)?;
    let reference = solve(&linear, &config)?;
    let z_ref = reference.encoder.embed_batch(probe.x.as_ref())?;
    println!(
        "{:>12} rank {:>4} r {} J_y {:.6} J_s {:.6}",
        "linear mode",
        linear.rank(),
        reference.encoder.dim(),
        reference.objectives.target_loss,
        reference.objectives.adversary_loss
    );

    for spec in [KernelSpec::Linear, KernelSpec::polynomial(3), KernelSpec::rbf_median()] {
        let model = KernelModel::fit(&spec, data.x.as_ref())?;
        let problem = build_problem_kernel(model, data.y.as_ref(), data.s.as_ref(), tol)?;
        let sol = solve(&problem, &config)?;
        let name = match spec {
            KernelSpec::Linear => "linear",
            KernelSpec::Polynomial { .. } => "poly-3",
            KernelSpec::Rbf { .. } => "rbf",
        };
        println!(
            "{name:>12} rank {:>4} r {} J_y {:.6} J_s {:.6}",
            problem.rank(),
            sol.encoder.dim(),
            sol.objectives.target_loss,
            sol.objectives.adversary_loss
        );
        if matches!(spec, KernelSpec::Linear) {
            let z = sol.encoder.embed_batch(probe.x.as_ref())?;
            println!("{:>12} max embedding difference on new points {:.2e}", "", sarl::numerics::max_abs((z - &z_ref).as_ref()));
        }
    }
    Ok(())
}

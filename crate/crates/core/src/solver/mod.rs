//! The spectral solver and everything built on it.

mod bisect;
mod bounds;
mod covariance;
mod encoder;
mod problem;
mod spectral;
mod sweep;

pub use bisect::{bisect_alpha, bisect_alpha_with, BisectionOutcome, DEFAULT_MAX_ITER};
pub use bounds::{compute_bounds, BoundValues, Bounds};
pub use covariance::{build_b_covariance, min_mse_given_encoder, CovarianceModel, Target};
pub use encoder::{embed, recover_encoder, EmbeddingMap, Encoder};
pub use problem::{build_problem_kernel, build_problem_linear, objectives, Mode, Objectives, Problem};
pub use spectral::{
    build_b, spectral_solve, SolverConfig, SpectralSelection, DEFAULT_NEGATIVITY_THRESHOLD,
};
pub use sweep::{lambda_grid, sweep_lambda, sweep_solutions, DEFAULT_GRID_POINTS};

#[derive(Clone, Debug)]
pub struct Solution {
    pub lambda: f64,
    pub encoder: Encoder,
    pub objectives: Objectives,
    /// Negative eigenvalues of `B` before any rank cap.
    pub negative_count: usize,
    /// `|B|_2`
    pub spectral_norm: f64,
}

/// Global optimum of the trade-off at `config.lambda`.
pub fn solve(problem: &Problem, config: &SolverConfig) -> crate::error::Result<Solution> {
    config.validate()?;
    let b = build_b(problem, config.lambda)?;
    let selection = spectral_solve(b.as_ref(), config)?;
    let mut g = selection.basis;
    problem.canonicalize_signs(&mut g);
    let encoder = recover_encoder(problem, g.as_ref(), &selection.eigenvalues)?;
    let objectives = problem.objectives(g.as_ref())?;
    Ok(Solution {
        lambda: config.lambda,
        encoder,
        objectives,
        negative_count: selection.negative_count,
        spectral_norm: selection.spectral_norm,
    })
}

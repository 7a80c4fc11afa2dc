use crate::error::{Result, SarlError};

use super::bounds::{compute_bounds, Bounds};
use super::spectral::SolverConfig;
use super::{solve, Problem, Solution};

pub const DEFAULT_MAX_ITER: usize = 100;

/// Slack on the feasibility check, relative to `alpha_max`.
const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct BisectionOutcome {
    pub lambda: f64,
    pub solution: Solution,
    pub iterations: usize,
    pub bounds: Bounds,
    /// `(lambda, J_s)` for every solve, in order.
    pub trace: Vec<(f64, f64)>,
}

/// Searches for the trade-off weight whose optimal encoder has adversary
/// loss within `epsilon` of `alpha_tol`.
pub fn bisect_alpha(
    problem: &Problem,
    alpha_tol: f64,
    epsilon: f64,
    max_iter: usize,
) -> Result<BisectionOutcome> {
    bisect_alpha_with(problem, alpha_tol, epsilon, max_iter, &SolverConfig::default())
}

/// As [`bisect_alpha`], taking rank cap and zero-eigenvector options from
/// `base` (its `lambda` is ignored).
pub fn bisect_alpha_with(
    problem: &Problem,
    alpha_tol: f64,
    epsilon: f64,
    max_iter: usize,
    base: &SolverConfig,
) -> Result<BisectionOutcome> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(SarlError::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    if max_iter == 0 {
        return Err(SarlError::InvalidConfig("max_iter must be at least 1".into()));
    }
    if !alpha_tol.is_finite() {
        return Err(SarlError::InvalidConfig(format!("alpha_tol must be finite, got {alpha_tol}")));
    }
    let bounds = compute_bounds(problem, problem.rank_tolerance())?;
    let slack = FEASIBILITY_SLACK * bounds.alpha_max.abs().max(1.0);
    if alpha_tol < bounds.alpha_min - slack || alpha_tol > bounds.alpha_max + slack {
        return Err(SarlError::InfeasibleTolerance {
            alpha_tol,
            alpha_min: bounds.alpha_min,
            alpha_max: bounds.alpha_max,
        });
    }

    let (mut lo, mut hi, mut lambda) = (0.0_f64, 1.0_f64, 0.5_f64);
    let mut trace = Vec::new();
    let mut best: Option<(f64, Solution)> = None;
    for iteration in 1..=max_iter {
        let solution = solve(problem, &SolverConfig { lambda, ..*base })?;
        let alpha = solution.objectives.adversary_loss;
        trace.push((lambda, alpha));
        let gap = (alpha - alpha_tol).abs();
        if gap <= epsilon {
            return Ok(BisectionOutcome {
                lambda,
                solution,
                iterations: iteration,
                bounds,
                trace,
            });
        }
        if best.as_ref().is_none_or(|(g, _)| gap < *g) {
            best = Some((gap, solution));
        }
        if alpha < alpha_tol {
            lo = lambda;
            lambda = 0.5 * (lambda + hi);
        } else {
            hi = lambda;
            lambda = 0.5 * (lambda + lo);
        }
    }
    let (_, sol) = best.expect("at least one iteration ran");
    Err(SarlError::NotReached {
        iterations: max_iter,
        best_lambda: sol.lambda,
        best_adversary_loss: sol.objectives.adversary_loss,
    })
}

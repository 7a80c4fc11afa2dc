use rayon::prelude::*;

use crate::error::{Result, SarlError};
use crate::eval::TradeoffPoint;

use super::spectral::SolverConfig;
use super::{solve, Problem, Solution};

pub const DEFAULT_GRID_POINTS: usize = 21;

/// `points` evenly spaced values on `[0, 1]`, endpoints included.
pub fn lambda_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|k| k as f64 / (points - 1) as f64).collect(),
    }
}

/// Solves every grid value independently (in parallel), keeping grid order.
/// The first failing point, in grid order, is reported with its lambda.
pub fn sweep_solutions(problem: &Problem, grid: &[f64], config: &SolverConfig) -> Result<Vec<Solution>> {
    let results: Vec<Result<Solution>> = grid
        .par_iter()
        .map(|&lambda| {
            solve(problem, &SolverConfig { lambda, ..*config }).map_err(|e| SarlError::AtLambda {
                lambda,
                source: Box::new(e),
            })
        })
        .collect();
    results.into_iter().collect()
}

pub fn sweep_lambda(problem: &Problem, grid: &[f64], config: &SolverConfig) -> Result<Vec<TradeoffPoint>> {
    Ok(sweep_solutions(problem, grid, config)?
        .iter()
        .map(TradeoffPoint::from_solution)
        .collect())
}

use faer::MatRef;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarlError};
use crate::numerics::{sym_eig, Matrix};

use super::problem::Problem;

/// Default relative cutoff below which an eigenvalue of `B` counts as negative.
pub const DEFAULT_NEGATIVITY_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Trade-off weight: 0 optimizes the target only, 1 hides the sensitive
    /// attribute only.
    pub lambda: f64,
    /// Optional cap `r` on the embedding dimension.
    pub max_rank: Option<usize>,
    /// An eigenvalue is negative when below `-threshold * |B|_2`.
    pub negativity_threshold: f64,
    /// Append eigenvectors of (numerically) zero eigenvalues to the encoder.
    pub include_zero_eigenvectors: bool,
}

impl SolverConfig {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }

    pub fn with_max_rank(mut self, r: usize) -> Self {
        self.max_rank = Some(r);
        self
    }

    pub fn with_zero_eigenvectors(mut self, include: bool) -> Self {
        self.include_zero_eigenvectors = include;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_lambda(self.lambda)?;
        if !(self.negativity_threshold > 0.0) {
            return Err(SarlError::InvalidConfig(format!(
                "negativity threshold must be positive, got {}",
                self.negativity_threshold
            )));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            max_rank: None,
            negativity_threshold: DEFAULT_NEGATIVITY_THRESHOLD,
            include_zero_eigenvectors: false,
        }
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(SarlError::InvalidLambda(lambda))
    }
}

/// `B = lambda (S~ L_x)^T (S~ L_x) - (1 - lambda) (Y~ L_x)^T (Y~ L_x)`.
///
/// Only the `rho x rho` result is formed; the `n x n` label Gram matrices are not.
pub fn build_b(problem: &Problem, lambda: f64) -> Result<Matrix> {
    check_lambda(lambda)?;
    let sl = problem.sensitive_in_basis();
    let yl = problem.target_in_basis();
    let leak = sl.transpose() * sl;
    let util = yl.transpose() * yl;
    Ok(leak * lambda - util * (1.0 - lambda))
}

/// Eigenvectors chosen as the optimal encoder subspace.
#[derive(Clone, Debug)]
pub struct SpectralSelection {
    /// `G_E`, column-orthonormal, `rho x r`.
    pub basis: Matrix,
    /// Eigenvalues paired with the columns of `basis`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Number of eigenvalues below the negativity threshold (before any cap).
    pub negative_count: usize,
    /// `|B|_2`
    pub spectral_norm: f64,
}

impl SpectralSelection {
    /// Minimum of `Tr[G^T B G]`: the sum of the selected eigenvalues.
    pub fn objective(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// Trace minimization over column-orthonormal matrices: keeps the
/// eigenvectors of the negative eigenvalues of `b`, most negative first,
/// optionally capped at `max_rank` and optionally followed by the
/// zero-eigenvalue eigenvectors.
pub fn spectral_solve(b: MatRef<'_, f64>, config: &SolverConfig) -> Result<SpectralSelection> {
    config.validate()?;
    let eig = sym_eig(b)?;
    let rho = eig.len();
    let norm = eig.spectral_norm();
    let cutoff = config.negativity_threshold * norm;
    let negative_count = eig.values.iter().take_while(|&&v| v < -cutoff).count();
    let cap = config.max_rank.unwrap_or(usize::MAX);

    let mut chosen: Vec<usize> = (0..negative_count).take(cap).collect();
    if config.include_zero_eigenvectors {
        let zeros = (negative_count..rho).take_while(|&k| eig.values[k].abs() <= cutoff);
        for k in zeros {
            if chosen.len() >= cap {
                break;
            }
            chosen.push(k);
        }
    }
    let basis = Matrix::from_fn(rho, chosen.len(), |i, c| eig.vectors[(i, chosen[c])]);
    let eigenvalues = chosen.iter().map(|&k| eig.values[k]).collect();
    Ok(SpectralSelection {
        basis,
        eigenvalues,
        negative_count,
        spectral_norm: norm,
    })
}

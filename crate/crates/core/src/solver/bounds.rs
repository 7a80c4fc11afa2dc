use serde::{Deserialize, Serialize};

use crate::error::{Result, SarlError};
use crate::numerics::{frobenius_sq, Matrix, RankTolerance};

use super::problem::Problem;

/// Attainable extremes of the target and adversary losses on the training set.
#[derive(Clone, Debug)]
pub struct Bounds {
    /// Best achievable target loss (attained at lambda = 0).
    pub gamma_min: f64,
    /// Best target loss among encoders that give the adversary no
    /// information (attained as lambda approaches 1).
    pub gamma_max: f64,
    /// Largest adversary loss among encoders optimal for the target.
    pub alpha_min: f64,
    /// Adversary loss of an uninformative encoder, `|S~^T|_F^2 / n`.
    pub alpha_max: f64,
    /// Basis-coordinate directions invisible to the adversary: right
    /// singular vectors of `S~ L_x` with zero singular value.
    pub v_s: Matrix,
    /// Right singular vectors of `Y~ L_x` with non-zero singular value.
    pub v_y: Matrix,
}

/// Scalar part of [`Bounds`], for reports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValues {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl Bounds {
    pub fn values(&self) -> BoundValues {
        BoundValues {
            gamma_min: self.gamma_min,
            gamma_max: self.gamma_max,
            alpha_min: self.alpha_min,
            alpha_max: self.alpha_max,
        }
    }
}

struct RightSingular {
    /// All right singular vectors, `cols x cols`, ordered by decreasing
    /// singular value (padded with the null-space directions).
    v: Matrix,
    rank: usize,
}

/// Rank is counted against `scale`, the norm of the matrix before projection
/// onto the basis, so a projection that vanishes up to round-off has rank 0.
fn right_singular(m: &Matrix, scale: f64, tol: RankTolerance) -> Result<RightSingular> {
    let cols = m.ncols();
    if cols == 0 || m.nrows() == 0 {
        return Ok(RightSingular {
            v: Matrix::identity(cols, cols),
            rank: 0,
        });
    }
    let svd = m
        .svd()
        .map_err(|e| SarlError::Decomposition(format!("svd: {e:?}")))?;
    let s = svd.S().column_vector();
    let largest = if s.nrows() > 0 { s[0].max(scale) } else { 0.0 };
    let rank = if largest > 0.0 {
        let cutoff = tol.threshold(largest);
        (0..s.nrows()).take_while(|&k| s[k] > cutoff).count()
    } else {
        0
    };
    Ok(RightSingular {
        v: svd.V().to_owned(),
        rank,
    })
}

/// Closed-form bounds from the singular structure of `Y~ L_x` and `S~ L_x`.
pub fn compute_bounds(problem: &Problem, tol: RankTolerance) -> Result<Bounds> {
    let n = problem.n_samples() as f64;
    let yl = problem.target_in_basis();
    let sl = problem.sensitive_in_basis();
    let rho = problem.rank();

    let sv_s = right_singular(sl, (n * problem.sensitive_variance()).sqrt(), tol)?;
    let v_s = sv_s.v.subcols(sv_s.rank, rho - sv_s.rank).to_owned();
    let sv_y = right_singular(yl, (n * problem.target_variance()).sqrt(), tol)?;
    let v_y = sv_y.v.subcols(0, sv_y.rank).to_owned();

    let y_total = problem.target_variance();
    let s_total = problem.sensitive_variance();
    let gamma_min = y_total - frobenius_sq(yl.as_ref()) / n;
    let gamma_max = y_total - frobenius_sq((yl * &v_s).as_ref()) / n;
    let alpha_min = s_total - frobenius_sq((sl * &v_y).as_ref()) / n;
    let alpha_max = s_total;

    Ok(Bounds {
        gamma_min,
        gamma_max,
        alpha_min,
        alpha_max,
        v_s,
        v_y,
    })
}

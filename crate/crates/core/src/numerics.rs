//! Dense real-matrix primitives with explicit rank and tolerance contracts.
//!
//! Matrices are `faer::Mat<f64>`. Samples are stored as columns throughout
//! the crate (a `d x n` matrix holds `n` samples of dimension `d`).

use faer::{Mat, MatRef, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarlError};

pub type Matrix = Mat<f64>;

/// Relative singular-value cutoff used to decide numerical rank.
///
/// A singular value (or, for PSD inputs, an eigenvalue) counts towards the
/// rank when it exceeds `relative_cutoff` times the largest one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTolerance {
    relative_cutoff: f64,
}

impl RankTolerance {
    pub const DEFAULT_CUTOFF: f64 = 1e-10;

    pub fn new(relative_cutoff: f64) -> Result<Self> {
        if !(relative_cutoff > 0.0 && relative_cutoff < 1.0) {
            return Err(SarlError::InvalidConfig(format!(
                "rank tolerance must lie in (0, 1), got {relative_cutoff}"
            )));
        }
        Ok(Self { relative_cutoff })
    }

    pub fn relative_cutoff(&self) -> f64 {
        self.relative_cutoff
    }

    /// Absolute threshold for a spectrum whose largest magnitude is `largest`.
    pub fn threshold(&self, largest: f64) -> f64 {
        self.relative_cutoff * largest
    }
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self {
            relative_cutoff: Self::DEFAULT_CUTOFF,
        }
    }
}

/// Eigenvalues in ascending order with their eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest eigenvalue magnitude, i.e. the spectral norm of the
    /// decomposed matrix.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// Orthonormal basis of the range of a symmetric PSD matrix together with the
/// retained (positive) eigenvalues, both taken from one eigendecomposition.
///
/// `basis * diag(1 / eigenvalues) * basis^T` is the pseudo-inverse.
#[derive(Clone, Debug)]
pub struct PsdFactor {
    pub basis: Matrix,
    /// Retained eigenvalues, largest first, paired with the columns of `basis`.
    pub eigenvalues: Vec<f64>,
}

impl PsdFactor {
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `basis^T * pinv(K)`, i.e. `diag(1/mu) * basis^T`.
    pub fn basis_times_pinv(&self) -> Matrix {
        let b = &self.basis;
        Matrix::from_fn(b.ncols(), b.nrows(), |i, j| b[(j, i)] / self.eigenvalues[i])
    }

    pub fn pseudo_inverse(&self) -> Matrix {
        let scaled = self.basis_times_pinv();
        &self.basis * &scaled
    }
}

pub fn ensure_finite(m: MatRef<'_, f64>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(SarlError::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub fn frobenius_sq(m: MatRef<'_, f64>) -> f64 {
    m.squared_norm_l2()
}

pub fn frobenius(m: MatRef<'_, f64>) -> f64 {
    m.norm_l2()
}

pub fn max_abs(m: MatRef<'_, f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        0.0
    } else {
        m.norm_max()
    }
}

/// Per-row average of a column-sample matrix.
pub fn row_means(x: MatRef<'_, f64>) -> Vec<f64> {
    let n = x.ncols() as f64;
    (0..x.nrows())
        .map(|i| (0..x.ncols()).map(|j| x[(i, j)]).sum::<f64>() / n)
        .collect()
}

/// Subtracts the per-row mean, i.e. computes `X D` with `D = I - 11^T / n`.
pub fn center_columns(x: MatRef<'_, f64>) -> Result<(Matrix, Vec<f64>)> {
    if x.ncols() == 0 {
        return Err(SarlError::EmptyInput("cannot center a matrix with no columns".into()));
    }
    let mean = row_means(x);
    let centered = Matrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] - mean[i]);
    Ok((centered, mean))
}

pub fn symmetrize(b: MatRef<'_, f64>) -> Matrix {
    Matrix::from_fn(b.nrows(), b.ncols(), |i, j| 0.5 * (b[(i, j)] + b[(j, i)]))
}

fn asymmetry(b: MatRef<'_, f64>) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..b.ncols() {
        for i in 0..j {
            worst = worst.max((b[(i, j)] - b[(j, i)]).abs());
        }
    }
    worst
}

/// Orthonormal basis for the column space of `m`, truncated at numerical rank.
///
/// An all-zero input yields a basis with zero columns.
pub fn orthonormal_range(m: MatRef<'_, f64>, tol: RankTolerance) -> Result<Matrix> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(SarlError::EmptyInput("orthonormal_range of an empty matrix".into()));
    }
    ensure_finite(m)?;
    let svd = m
        .thin_svd()
        .map_err(|e| SarlError::Decomposition(format!("svd: {e:?}")))?;
    let s = svd.S().column_vector();
    let largest = s[0];
    if largest <= 0.0 {
        return Ok(Matrix::zeros(m.nrows(), 0));
    }
    let cutoff = tol.threshold(largest);
    let rank = (0..s.nrows()).take_while(|&k| s[k] > cutoff).count();
    Ok(svd.U().subcols(0, rank).to_owned())
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
///
/// The input is symmetrized as `(B + B^T) / 2` before decomposition.
pub fn sym_eig(b: MatRef<'_, f64>) -> Result<EigenSystem> {
    if b.nrows() != b.ncols() {
        return Err(SarlError::shape(format!(
            "sym_eig expects a square matrix, got {}x{}",
            b.nrows(),
            b.ncols()
        )));
    }
    let n = b.nrows();
    if n == 0 {
        return Ok(EigenSystem {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        });
    }
    ensure_finite(b)?;
    let skew = asymmetry(b);
    if skew > 1e-9 * frobenius(b) {
        log::warn!("sym_eig input asymmetric by {skew:e}; symmetrizing");
    }
    let sym = symmetrize(b);
    let evd = sym
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| SarlError::Decomposition(format!("eigendecomposition: {e:?}")))?;
    let diag = evd.S().column_vector();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| diag[a].total_cmp(&diag[c]));
    let values = order.iter().map(|&k| diag[k]).collect();
    let u = evd.U();
    let vectors = Matrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    Ok(EigenSystem { values, vectors })
}

/// Moore-Penrose pseudo-inverse via a truncated thin SVD.
pub fn pseudo_inverse(m: MatRef<'_, f64>, tol: RankTolerance) -> Result<Matrix> {
    let (rows, cols) = (m.nrows(), m.ncols());
    if rows == 0 || cols == 0 {
        return Ok(Matrix::zeros(cols, rows));
    }
    ensure_finite(m)?;
    let svd = m
        .thin_svd()
        .map_err(|e| SarlError::Decomposition(format!("svd: {e:?}")))?;
    let s = svd.S().column_vector();
    let largest = s[0];
    if largest <= 0.0 {
        return Ok(Matrix::zeros(cols, rows));
    }
    let cutoff = tol.threshold(largest);
    let rank = (0..s.nrows()).take_while(|&k| s[k] > cutoff).count();
    let u = svd.U().subcols(0, rank);
    let v = svd.V().subcols(0, rank);
    let v_scaled = Matrix::from_fn(cols, rank, |i, k| v[(i, k)] / s[k]);
    Ok(&v_scaled * u.transpose())
}

/// Upper-triangular `Q` with `Q^T Q = C` for symmetric positive definite `C`.
pub fn cholesky(c: MatRef<'_, f64>, tol: RankTolerance) -> Result<Matrix> {
    if c.nrows() != c.ncols() {
        return Err(SarlError::shape(format!(
            "cholesky expects a square matrix, got {}x{}",
            c.nrows(),
            c.ncols()
        )));
    }
    if c.nrows() == 0 {
        return Err(SarlError::EmptyInput("cholesky of an empty matrix".into()));
    }
    ensure_finite(c)?;
    let sym = symmetrize(c);
    let values = sym
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| SarlError::Decomposition(format!("eigenvalues: {e:?}")))?;
    let smallest = values.iter().copied().fold(f64::INFINITY, f64::min);
    let largest = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if largest <= 0.0 || smallest <= tol.threshold(largest) {
        return Err(SarlError::NotPositiveDefinite {
            min_eigenvalue: smallest,
        });
    }
    let llt = sym.llt(Side::Lower).map_err(|_| SarlError::NotPositiveDefinite {
        min_eigenvalue: smallest,
    })?;
    Ok(llt.L().transpose().to_owned())
}

/// Solves `Q^T X = A` for upper-triangular `Q` by forward substitution.
pub fn solve_upper_transposed(q: MatRef<'_, f64>, a: MatRef<'_, f64>) -> Matrix {
    let d = q.nrows();
    let mut x = Matrix::zeros(d, a.ncols());
    for col in 0..a.ncols() {
        for i in 0..d {
            let mut acc = a[(i, col)];
            for k in 0..i {
                acc -= q[(k, i)] * x[(k, col)];
            }
            x[(i, col)] = acc / q[(i, i)];
        }
    }
    x
}

/// Range basis and pseudo-inverse data of a symmetric PSD matrix from a
/// single eigendecomposition.
pub fn psd_factor(k: MatRef<'_, f64>, tol: RankTolerance) -> Result<PsdFactor> {
    let eig = sym_eig(k)?;
    let n = eig.len();
    let largest = eig.values.last().copied().unwrap_or(0.0);
    if n == 0 || largest <= 0.0 {
        return Ok(PsdFactor {
            basis: Matrix::zeros(k.nrows(), 0),
            eigenvalues: Vec::new(),
        });
    }
    let smallest = eig.values[0];
    if smallest < -1e-8 * largest {
        log::warn!("PSD factor input has eigenvalue {smallest:e} (largest {largest:e}); clamping");
    }
    let cutoff = tol.threshold(largest);
    let kept: Vec<usize> = (0..n).rev().filter(|&j| eig.values[j] > cutoff).collect();
    let basis = Matrix::from_fn(n, kept.len(), |i, c| eig.vectors[(i, kept[c])]);
    let eigenvalues = kept.iter().map(|&j| eig.values[j]).collect();
    Ok(PsdFactor { basis, eigenvalues })
}

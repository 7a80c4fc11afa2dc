use faer::MatRef;

use crate::error::{Result, SarlError};
use crate::kernels::{center_kernel_vector, kernel_vector_with, KernelSpec};
use crate::numerics::Matrix;

use super::problem::{Mode, Problem};

/// What an encoder needs besides its parameter matrix to map a raw sample.
#[derive(Clone, Debug)]
pub enum EmbeddingMap {
    /// `z = Theta_E (x - mean)`
    Linear { mean: Vec<f64> },
    /// `z = Lambda k~(x)` where `k~` is the kernel vector against the
    /// training set, centered with the training Gram statistics.
    Kernel {
        spec: KernelSpec,
        train_x: Matrix,
        gram_row_means: Vec<f64>,
        gram_mean: f64,
    },
}

/// A solved encoder.
///
/// `params` is `Theta_E` (`r x d`) in linear mode and `Lambda` (`r x n`) in
/// kernel mode.
#[derive(Clone, Debug)]
pub struct Encoder {
    mode: Mode,
    basis_coords: Matrix,
    params: Matrix,
    eigenvalues_used: Vec<f64>,
    map: EmbeddingMap,
}

/// Builds the minimum-norm encoder for the subspace spanned by the
/// column-orthonormal `g` (`rho x r`): `Theta_E = G^T L_x^T pinv(X~)` or
/// `Lambda = G^T L_x^T pinv(K~)`.
pub fn recover_encoder(problem: &Problem, g: MatRef<'_, f64>, eigenvalues: &[f64]) -> Result<Encoder> {
    if g.nrows() != problem.rank() {
        return Err(SarlError::shape(format!(
            "encoder basis has {} rows, problem rank is {}",
            g.nrows(),
            problem.rank()
        )));
    }
    if eigenvalues.len() != g.ncols() {
        return Err(SarlError::shape(format!(
            "{} eigenvalues for {} basis columns",
            eigenvalues.len(),
            g.ncols()
        )));
    }
    let params = g.transpose() * problem.coordinate_map();
    let map = match problem.kernel() {
        None => EmbeddingMap::Linear {
            mean: problem.mean_x().to_vec(),
        },
        Some(model) => EmbeddingMap::Kernel {
            spec: *model.spec(),
            train_x: model.train_x().clone(),
            gram_row_means: model.gram_row_means().to_vec(),
            gram_mean: model.gram_mean(),
        },
    };
    Ok(Encoder {
        mode: problem.mode(),
        basis_coords: g.to_owned(),
        params,
        eigenvalues_used: eigenvalues.to_vec(),
        map,
    })
}

impl Encoder {
    /// Reassembles an encoder from stored parts.
    pub fn from_parts(
        basis_coords: Matrix,
        params: Matrix,
        eigenvalues_used: Vec<f64>,
        map: EmbeddingMap,
    ) -> Result<Self> {
        let mode = match map {
            EmbeddingMap::Linear { .. } => Mode::Linear,
            EmbeddingMap::Kernel { .. } => Mode::Kernel,
        };
        let expected_cols = match &map {
            EmbeddingMap::Linear { mean } => mean.len(),
            EmbeddingMap::Kernel { train_x, .. } => train_x.ncols(),
        };
        if params.ncols() != expected_cols
            || params.nrows() != basis_coords.ncols()
            || eigenvalues_used.len() != basis_coords.ncols()
        {
            return Err(SarlError::shape(format!(
                "inconsistent encoder parts: params {}x{}, basis {}x{}, {} eigenvalues, input width {}",
                params.nrows(),
                params.ncols(),
                basis_coords.nrows(),
                basis_coords.ncols(),
                eigenvalues_used.len(),
                expected_cols
            )));
        }
        Ok(Self {
            mode,
            basis_coords,
            params,
            eigenvalues_used,
            map,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Embedding dimension `r`.
    pub fn dim(&self) -> usize {
        self.params.nrows()
    }

    /// `G_E`
    pub fn basis_coords(&self) -> &Matrix {
        &self.basis_coords
    }

    /// `Theta_E` or `Lambda`.
    pub fn params(&self) -> &Matrix {
        &self.params
    }

    pub fn eigenvalues_used(&self) -> &[f64] {
        &self.eigenvalues_used
    }

    /// Optimal value of `Tr[G^T B G]`.
    pub fn objective_value(&self) -> f64 {
        self.eigenvalues_used.iter().sum()
    }

    pub fn map(&self) -> &EmbeddingMap {
        &self.map
    }

    /// Raw input dimension `d`.
    pub fn input_dim(&self) -> usize {
        match &self.map {
            EmbeddingMap::Linear { mean } => mean.len(),
            EmbeddingMap::Kernel { train_x, .. } => train_x.nrows(),
        }
    }

    fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(SarlError::shape(format!(
                "encoder expects inputs of dimension {}, got {}",
                self.input_dim(),
                x.len()
            )));
        }
        match &self.map {
            EmbeddingMap::Linear { mean } => Ok(x.iter().zip(mean).map(|(v, m)| v - m).collect()),
            EmbeddingMap::Kernel {
                spec,
                train_x,
                gram_row_means,
                gram_mean,
            } => {
                let k = kernel_vector_with(spec, train_x, x)?;
                Ok(center_kernel_vector(&k, gram_row_means, *gram_mean))
            }
        }
    }

    /// Embeds one raw sample.
    pub fn embed(&self, x: &[f64]) -> Result<Vec<f64>> {
        let f = self.features(x)?;
        Ok((0..self.dim())
            .map(|k| (0..f.len()).map(|j| self.params[(k, j)] * f[j]).sum())
            .collect())
    }

    /// Embeds every column of `x` (`d x m`), returning `r x m`.
    pub fn embed_batch(&self, x: MatRef<'_, f64>) -> Result<Matrix> {
        if x.nrows() != self.input_dim() {
            return Err(SarlError::shape(format!(
                "encoder expects inputs of dimension {}, got {}",
                self.input_dim(),
                x.nrows()
            )));
        }
        let m = x.ncols();
        let width = self.params.ncols();
        let mut feats = Matrix::zeros(width, m);
        for j in 0..m {
            let col: Vec<f64> = (0..x.nrows()).map(|i| x[(i, j)]).collect();
            let f = self.features(&col)?;
            for (i, v) in f.into_iter().enumerate() {
                feats[(i, j)] = v;
            }
        }
        Ok(&self.params * &feats)
    }
}

/// Free-function form of [`Encoder::embed`].
pub fn embed(encoder: &Encoder, x: &[f64]) -> Result<Vec<f64>> {
    encoder.embed(x)
}

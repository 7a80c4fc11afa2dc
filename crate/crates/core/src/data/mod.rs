//! Datasets: CSV ingestion, encoding, splitting and synthetic generation.
//!
//! Files store one sample per row. In memory every matrix stores one sample
//! per column (`X` is `d x n`).

mod synth;
mod table;
pub mod uci;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarlError};
use crate::numerics::Matrix;

pub use synth::{gen_gaussian_mixture, MIXTURE_MEANS, MIXTURE_SIGMA};
pub use table::{
    load_csv, load_csv_with_schema, write_csv, AttributeColumn, ColumnSpec, DatasetSchema,
    DatasetSpec, Encoding, FeatureColumn, Role,
};

/// Identifier of the random generator behind every seeded operation.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64)";

/// Column-sample data with its encoding schema.
#[derive(Clone, Debug)]
pub struct Dataset {
    /// `d x n`
    pub x: Matrix,
    /// `p x n`
    pub y: Matrix,
    /// `q x n`
    pub s: Matrix,
    pub schema: DatasetSchema,
}

impl Dataset {
    pub fn n_samples(&self) -> usize {
        self.x.ncols()
    }

    /// Class index per sample of the first categorical target column.
    pub fn target_labels(&self) -> Option<Vec<usize>> {
        labels_of(&self.y, &self.schema.target)
    }

    /// Class index per sample of the first categorical sensitive column.
    pub fn sensitive_labels(&self) -> Option<Vec<usize>> {
        labels_of(&self.s, &self.schema.sensitive)
    }

    /// The samples at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let pick = |m: &Matrix| Matrix::from_fn(m.nrows(), indices.len(), |i, j| m[(i, indices[j])]);
        Dataset {
            x: pick(&self.x),
            y: pick(&self.y),
            s: pick(&self.s),
            schema: self.schema.clone(),
        }
    }
}

fn labels_of(m: &Matrix, columns: &[AttributeColumn]) -> Option<Vec<usize>> {
    let mut offset = 0;
    for col in columns {
        if let Some(levels) = &col.levels {
            return Some(argmax_block(m, offset, levels.len()));
        }
        offset += col.width();
    }
    None
}

fn argmax_block(m: &Matrix, offset: usize, width: usize) -> Vec<usize> {
    (0..m.ncols())
        .map(|j| {
            let mut best = 0;
            for c in 1..width {
                if m[(offset + c, j)] > m[(offset + best, j)] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// `classes x n` indicator matrix with a single one per column.
pub fn one_hot(labels: &[usize], classes: usize) -> Result<Matrix> {
    if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
        return Err(SarlError::LabelOutOfRange { label: bad, classes });
    }
    Ok(Matrix::from_fn(classes, labels.len(), |c, j| {
        if labels[j] == c {
            1.0
        } else {
            0.0
        }
    }))
}

/// Arg-max per column, ties going to the lowest row.
pub fn argmax_columns(m: &Matrix) -> Vec<usize> {
    argmax_block(m, 0, m.nrows())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

/// Seeded shuffle, then the first `round(n * train_fraction)` samples go to
/// the training side.
pub fn split(dataset: &Dataset, spec: SplitSpec) -> Result<(Dataset, Dataset)> {
    let (train_idx, test_idx) = split_indices(dataset.n_samples(), spec)?;
    Ok((dataset.select(&train_idx), dataset.select(&test_idx)))
}

pub fn split_indices(n: usize, spec: SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    let f = spec.train_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(SarlError::InvalidConfig(format!(
            "train fraction must lie strictly between 0 and 1, got {f}"
        )));
    }
    let n_train = (n as f64 * f).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(SarlError::InvalidConfig(format!(
            "train fraction {f} leaves one side of a {n}-sample split empty"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let test = order.split_off(n_train);
    Ok((order, test))
}

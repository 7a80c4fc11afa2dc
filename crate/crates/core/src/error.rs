use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = SarlError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SarlError {
    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("lambda must lie in [0, 1], got {0}")]
    InvalidLambda(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("tolerance {alpha_tol} lies outside the attainable range [{alpha_min}, {alpha_max}]")]
    InfeasibleTolerance {
        alpha_tol: f64,
        alpha_min: f64,
        alpha_max: f64,
    },

    #[error(
        "bisection stopped after {iterations} iterations without reaching the tolerance \
         (best lambda {best_lambda}, adversary loss {best_adversary_loss})"
    )]
    NotReached {
        iterations: usize,
        best_lambda: f64,
        best_adversary_loss: f64,
    },

    #[error("solve failed at lambda = {lambda}: {source}")]
    AtLambda {
        lambda: f64,
        #[source]
        source: Box<SarlError>,
    },

    #[error("sample count must be a positive multiple of {multiple_of}, got {count}")]
    InvalidCount { count: usize, multiple_of: usize },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at row {row}, column '{column}': cannot read {value:?}")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("missing value at row {row}, column '{column}'")]
    MissingValue { row: usize, column: String },

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("spec file error: {0}")]
    Toml(#[from] toml::de::Error),
}

impl SarlError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SarlError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        SarlError::ShapeMismatch(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            SarlError::InvalidLambda(_) | SarlError::InvalidConfig(_) => 64,
            SarlError::InfeasibleTolerance { .. } | SarlError::NotReached { .. } => 66,
            SarlError::AtLambda { source, .. } => source.exit_code(),
            SarlError::Io { .. } => 2,
            SarlError::Csv(e) if e.is_io_error() => 2,
            _ => 65,
        }
    }
}

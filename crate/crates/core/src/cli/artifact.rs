//! On-disk encoder: the parameter matrix as CSV plus a JSON sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{load_csv_with_schema, DatasetSchema};
use crate::error::{Result, SarlError};
use crate::kernels::KernelSpec;
use crate::numerics::Matrix;
use crate::solver::{EmbeddingMap, Encoder, Mode};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EncoderSidecar {
    pub format_version: u32,
    pub mode: Mode,
    pub r: usize,
    pub lambda: f64,
    pub input_dim: usize,
    /// Columns of the parameter matrix: `d` (linear) or `n` (kernel).
    pub param_cols: usize,
    pub params_file: String,
    pub eigenvalues: Vec<f64>,
    /// `G_E`, row-major `rho x r`.
    pub basis_coords: Vec<Vec<f64>>,
    pub mean_x: Option<Vec<f64>>,
    pub kernel: Option<KernelSpec>,
    /// Training CSV the kernel vectors are taken against, resolved relative
    /// to the sidecar's directory when not absolute.
    pub train_data: Option<PathBuf>,
    pub gram_row_means: Option<Vec<f64>>,
    pub gram_mean: Option<f64>,
    pub schema: DatasetSchema,
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<f64>], cols: usize) -> Result<Matrix> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(SarlError::shape("ragged matrix in encoder artifact"));
    }
    Ok(Matrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

pub fn write_matrix_csv(m: &Matrix, path: &Path, names: &[String]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| SarlError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    if !names.is_empty() {
        w.write_record(names)?;
    }
    for i in 0..m.nrows() {
        w.write_record((0..m.ncols()).map(|j| m[(i, j)].to_string()))?;
    }
    w.flush().map_err(|e| SarlError::io(path, e))?;
    Ok(())
}

fn read_matrix_csv(path: &Path, cols: usize) -> Result<Matrix> {
    let file = fs::File::open(path).map_err(|e| SarlError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(file);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                cell.parse::<f64>().map_err(|_| SarlError::Parse {
                    row: i + 1,
                    column: j.to_string(),
                    value: cell.to_string(),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    matrix_from_rows(&rows, cols)
}

/// Writes `<dir>/encoder.csv` and `<dir>/encoder.json`; returns the sidecar path.
pub fn save_encoder(
    encoder: &Encoder,
    lambda: f64,
    schema: &DatasetSchema,
    train_data: &Path,
    dir: &Path,
) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| SarlError::io(dir, e))?;
    let params_file = "encoder.csv";
    write_matrix_csv(encoder.params(), &dir.join(params_file), &[])?;
    let train_abs = fs::canonicalize(train_data).map_err(|e| SarlError::io(train_data, e))?;
    let mut sidecar = EncoderSidecar {
        format_version: FORMAT_VERSION,
        mode: encoder.mode(),
        r: encoder.dim(),
        lambda,
        input_dim: encoder.input_dim(),
        param_cols: encoder.params().ncols(),
        params_file: params_file.into(),
        eigenvalues: encoder.eigenvalues_used().to_vec(),
        basis_coords: rows_of(encoder.basis_coords()),
        mean_x: None,
        kernel: None,
        train_data: Some(train_abs),
        gram_row_means: None,
        gram_mean: None,
        schema: schema.clone(),
    };
    match encoder.map() {
        EmbeddingMap::Linear { mean } => sidecar.mean_x = Some(mean.clone()),
        EmbeddingMap::Kernel {
            spec,
            gram_row_means,
            gram_mean,
            ..
        } => {
            sidecar.kernel = Some(*spec);
            sidecar.gram_row_means = Some(gram_row_means.clone());
            sidecar.gram_mean = Some(*gram_mean);
        }
    }
    let path = dir.join("encoder.json");
    let text = serde_json::to_string_pretty(&sidecar)?;
    fs::write(&path, text).map_err(|e| SarlError::io(&path, e))?;
    Ok(path)
}

pub fn load_encoder(sidecar_path: &Path) -> Result<(Encoder, EncoderSidecar)> {
    let text = fs::read_to_string(sidecar_path).map_err(|e| SarlError::io(sidecar_path, e))?;
    let sidecar: EncoderSidecar = serde_json::from_str(&text)?;
    if sidecar.format_version != FORMAT_VERSION {
        return Err(SarlError::Schema(format!(
            "unsupported encoder format version {}",
            sidecar.format_version
        )));
    }
    let base = sidecar_path.parent().unwrap_or(Path::new("."));
    let params = read_matrix_csv(&base.join(&sidecar.params_file), sidecar.param_cols)?;
    let basis = matrix_from_rows(&sidecar.basis_coords, sidecar.r)?;
    let map = match sidecar.mode {
        Mode::Linear => EmbeddingMap::Linear {
            mean: sidecar
                .mean_x
                .clone()
                .ok_or_else(|| SarlError::Schema("linear encoder without mean_x".into()))?,
        },
        Mode::Kernel => {
            let missing = |what: &str| SarlError::Schema(format!("kernel encoder without {what}"));
            let train_ref = sidecar.train_data.clone().ok_or_else(|| missing("train_data"))?;
            let train_path = if train_ref.is_absolute() { train_ref } else { base.join(train_ref) };
            let train = load_csv_with_schema(&train_path, &sidecar.schema)?;
            EmbeddingMap::Kernel {
                spec: sidecar.kernel.ok_or_else(|| missing("kernel"))?,
                train_x: train.x,
                gram_row_means: sidecar.gram_row_means.clone().ok_or_else(|| missing("gram_row_means"))?,
                gram_mean: sidecar.gram_mean.ok_or_else(|| missing("gram_mean"))?,
            }
        }
    };
    let encoder = Encoder::from_parts(basis, params, sidecar.eigenvalues.clone(), map)?;
    Ok((encoder, sidecar))
}

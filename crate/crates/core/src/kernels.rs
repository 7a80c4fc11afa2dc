//! Kernel functions, Gram matrices and double centering.

use std::fmt;

use faer::MatRef;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarlError};
use crate::numerics::{row_means, Matrix};

/// Points used by the median heuristic are capped at this many.
pub const MEDIAN_HEURISTIC_SAMPLE: usize = 1000;
/// Seed for the median-heuristic subsample.
pub const MEDIAN_HEURISTIC_SEED: u64 = 0x5a51_0001;

/// Gaussian kernel bandwidth, either fixed or resolved from the training data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    Median,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `x^T x'`
    Linear,
    /// `(x^T x' + coef0)^degree`
    Polynomial { degree: u32, coef0: f64 },
    /// `exp(-|x - x'|^2 / (2 bandwidth^2))`
    Rbf { bandwidth: Bandwidth },
}

impl KernelSpec {
    pub fn polynomial(degree: u32) -> Self {
        KernelSpec::Polynomial { degree, coef0: 1.0 }
    }

    pub fn rbf_median() -> Self {
        KernelSpec::Rbf {
            bandwidth: Bandwidth::Median,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Polynomial { degree, coef0 } if degree == 0 || !coef0.is_finite() => {
                Err(SarlError::InvalidConfig(format!(
                    "polynomial kernel needs degree >= 1 and finite coef0 (got {degree}, {coef0})"
                )))
            }
            KernelSpec::Rbf {
                bandwidth: Bandwidth::Fixed(h),
            } if !(h > 0.0 && h.is_finite()) => Err(SarlError::InvalidConfig(format!(
                "rbf bandwidth must be positive, got {h}"
            ))),
            _ => Ok(()),
        }
    }

    /// Replaces a median-heuristic bandwidth by its value on `x`.
    pub fn resolve(&self, x: MatRef<'_, f64>) -> Result<KernelSpec> {
        self.validate()?;
        match *self {
            KernelSpec::Rbf {
                bandwidth: Bandwidth::Median,
            } => Ok(KernelSpec::Rbf {
                bandwidth: Bandwidth::Fixed(median_heuristic(x)?),
            }),
            other => Ok(other),
        }
    }

    pub fn is_resolved(&self) -> bool {
        !matches!(
            self,
            KernelSpec::Rbf {
                bandwidth: Bandwidth::Median
            }
        )
    }

    /// Evaluates the kernel on two points of equal length. Panics on an
    /// unresolved median bandwidth.
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(a, b),
            KernelSpec::Polynomial { degree, coef0 } => (dot(a, b) + coef0).powi(degree as i32),
            KernelSpec::Rbf {
                bandwidth: Bandwidth::Fixed(h),
            } => {
                let sq: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
                (-sq / (2.0 * h * h)).exp()
            }
            KernelSpec::Rbf {
                bandwidth: Bandwidth::Median,
            } => panic!("rbf kernel evaluated before its bandwidth was resolved"),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => write!(f, "linear"),
            KernelSpec::Polynomial { degree, coef0 } => {
                write!(f, "polynomial(degree={degree}, coef0={coef0})")
            }
            KernelSpec::Rbf {
                bandwidth: Bandwidth::Median,
            } => write!(f, "rbf(bandwidth=median)"),
            KernelSpec::Rbf {
                bandwidth: Bandwidth::Fixed(h),
            } => write!(f, "rbf(bandwidth={h})"),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn column(x: MatRef<'_, f64>, j: usize) -> Vec<f64> {
    (0..x.nrows()).map(|i| x[(i, j)]).collect()
}

/// Median pairwise Euclidean distance over at most
/// [`MEDIAN_HEURISTIC_SAMPLE`] seeded-subsampled columns of `x`.
pub fn median_heuristic(x: MatRef<'_, f64>) -> Result<f64> {
    let n = x.ncols();
    if n == 0 {
        return Err(SarlError::EmptyInput("median heuristic on empty data".into()));
    }
    let idx: Vec<usize> = if n > MEDIAN_HEURISTIC_SAMPLE {
        let mut rng = ChaCha8Rng::seed_from_u64(MEDIAN_HEURISTIC_SEED);
        let mut v = sample(&mut rng, n, MEDIAN_HEURISTIC_SAMPLE).into_vec();
        v.sort_unstable();
        v
    } else {
        (0..n).collect()
    };
    let cols: Vec<Vec<f64>> = idx.iter().map(|&j| column(x, j)).collect();
    let mut dists = Vec::with_capacity(cols.len() * cols.len().saturating_sub(1) / 2);
    for a in 0..cols.len() {
        for b in (a + 1)..cols.len() {
            let sq: f64 = cols[a].iter().zip(&cols[b]).map(|(u, v)| (u - v) * (u - v)).sum();
            dists.push(sq.sqrt());
        }
    }
    if dists.is_empty() {
        log::warn!("median heuristic needs two points; using bandwidth 1");
        return Ok(1.0);
    }
    dists.sort_by(f64::total_cmp);
    let m = dists.len();
    let median = if m % 2 == 1 {
        dists[m / 2]
    } else {
        0.5 * (dists[m / 2 - 1] + dists[m / 2])
    };
    if median > 0.0 {
        Ok(median)
    } else {
        log::warn!("median pairwise distance is zero; using bandwidth 1");
        Ok(1.0)
    }
}

/// Gram matrix `K[i, j] = k(x_i, x_j)` over the columns of `x`.
pub fn gram(spec: &KernelSpec, x: MatRef<'_, f64>) -> Result<Matrix> {
    if x.ncols() == 0 {
        return Err(SarlError::EmptyInput("gram matrix of an empty dataset".into()));
    }
    let spec = spec.resolve(x)?;
    if let KernelSpec::Linear = spec {
        return Ok(x.transpose() * x);
    }
    let n = x.ncols();
    let cols: Vec<Vec<f64>> = (0..n).map(|j| column(x, j)).collect();
    let mut k = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v = spec.eval(&cols[i], &cols[j]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Double centering `D^T K D`.
pub fn center_gram(k: MatRef<'_, f64>) -> Result<Matrix> {
    if k.nrows() != k.ncols() {
        return Err(SarlError::shape(format!(
            "center_gram expects a square matrix, got {}x{}",
            k.nrows(),
            k.ncols()
        )));
    }
    let n = k.nrows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let rows = row_means(k);
    let cols = row_means(k.transpose());
    let grand = rows.iter().sum::<f64>() / n as f64;
    Ok(Matrix::from_fn(n, n, |i, j| k[(i, j)] - rows[i] - cols[j] + grand))
}

/// A kernel fitted to training data: resolved spec, Gram matrix and its
/// centered form, plus the statistics needed to center new kernel vectors.
#[derive(Clone, Debug)]
pub struct KernelModel {
    spec: KernelSpec,
    train_x: Matrix,
    gram: Matrix,
    centered: Matrix,
    gram_row_means: Vec<f64>,
    gram_mean: f64,
}

impl KernelModel {
    pub fn fit(spec: &KernelSpec, train_x: MatRef<'_, f64>) -> Result<Self> {
        let spec = spec.resolve(train_x)?;
        let gram = gram(&spec, train_x)?;
        let centered = center_gram(gram.as_ref())?;
        let gram_row_means = row_means(gram.as_ref());
        let gram_mean = gram_row_means.iter().sum::<f64>() / gram_row_means.len() as f64;
        Ok(Self {
            spec,
            train_x: train_x.to_owned(),
            gram,
            centered,
            gram_row_means,
            gram_mean,
        })
    }

    /// The spec with any median bandwidth replaced by its resolved value.
    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn resolved_bandwidth(&self) -> Option<f64> {
        match self.spec {
            KernelSpec::Rbf {
                bandwidth: Bandwidth::Fixed(h),
            } => Some(h),
            _ => None,
        }
    }

    pub fn train_x(&self) -> &Matrix {
        &self.train_x
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn centered_gram(&self) -> &Matrix {
        &self.centered
    }

    pub fn n_samples(&self) -> usize {
        self.train_x.ncols()
    }

    pub fn input_dim(&self) -> usize {
        self.train_x.nrows()
    }

    pub fn gram_row_means(&self) -> &[f64] {
        &self.gram_row_means
    }

    pub fn gram_mean(&self) -> f64 {
        self.gram_mean
    }

    /// `[k(x_1, x), ..., k(x_n, x)]`.
    pub fn kernel_vector(&self, x: &[f64]) -> Result<Vec<f64>> {
        kernel_vector_with(&self.spec, &self.train_x, x)
    }

    /// Kernel vector of `x` centered consistently with the training Gram
    /// matrix, i.e. the inner products of the centered feature map of `x`
    /// with the centered training features.
    pub fn centered_kernel_vector(&self, x: &[f64]) -> Result<Vec<f64>> {
        let k = self.kernel_vector(x)?;
        Ok(center_kernel_vector(&k, &self.gram_row_means, self.gram_mean))
    }
}

pub fn kernel_vector_with(spec: &KernelSpec, train_x: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != train_x.nrows() {
        return Err(SarlError::shape(format!(
            "kernel vector expects dimension {}, got {}",
            train_x.nrows(),
            x.len()
        )));
    }
    Ok((0..train_x.ncols())
        .map(|j| spec.eval(train_x.col_as_slice(j), x))
        .collect())
}

pub fn center_kernel_vector(k: &[f64], gram_row_means: &[f64], gram_mean: f64) -> Vec<f64> {
    let mean = k.iter().sum::<f64>() / k.len() as f64;
    k.iter()
        .zip(gram_row_means)
        .map(|(v, r)| v - mean - r + gram_mean)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{center_columns, frobenius, sym_eig};
    use faer::mat;
    use rand::{Rng, SeedableRng};

    fn random(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn linear_gram_is_inner_products() {
        let x = random(3, 6, 1);
        let k = gram(&KernelSpec::Linear, x.as_ref()).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let direct: f64 = (0..3).map(|r| x[(r, i)] * x[(r, j)]).sum();
                assert!((k[(i, j)] - direct).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rbf_diagonal_is_one() {
        let x = random(2, 8, 2);
        let k = gram(&KernelSpec::rbf_median(), x.as_ref()).unwrap();
        for i in 0..8 {
            assert_eq!(k[(i, i)], 1.0);
            for j in 0..8 {
                assert!(k[(i, j)] > 0.0 && k[(i, j)] <= 1.0);
            }
        }
    }

    #[test]
    fn polynomial_single_sample() {
        let x = mat![[1.0], [0.0]];
        let k = gram(&KernelSpec::polynomial(2), x.as_ref()).unwrap();
        assert_eq!(k[(0, 0)], 4.0);
    }

    #[test]
    fn center_constant_gram() {
        let k = Matrix::from_fn(4, 4, |_, _| 1.0);
        let c = center_gram(k.as_ref()).unwrap();
        assert!(frobenius(c.as_ref()) < 1e-15);
    }

    #[test]
    fn center_is_idempotent_and_zero_sum() {
        let a = random(5, 5, 3);
        let k = a.transpose() * &a;
        let once = center_gram(k.as_ref()).unwrap();
        let twice = center_gram(once.as_ref()).unwrap();
        assert!(frobenius((&once - &twice).as_ref()) < 1e-14);
        for i in 0..5 {
            let row: f64 = (0..5).map(|j| once[(i, j)]).sum();
            let col: f64 = (0..5).map(|j| once[(j, i)]).sum();
            assert!(row.abs() < 1e-10 && col.abs() < 1e-10);
        }
    }

    #[test]
    fn center_rejects_rectangular() {
        assert!(matches!(
            center_gram(Matrix::zeros(2, 3).as_ref()),
            Err(SarlError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn centered_linear_gram_matches_centered_data() {
        let x = random(3, 9, 4);
        let k = gram(&KernelSpec::Linear, x.as_ref()).unwrap();
        let c = center_gram(k.as_ref()).unwrap();
        let (xc, _) = center_columns(x.as_ref()).unwrap();
        let direct = xc.transpose() * &xc;
        assert!(frobenius((&c - &direct).as_ref()) < 1e-9 * frobenius(k.as_ref()));
    }

    #[test]
    fn kernel_vector_matches_gram_column() {
        let x = random(3, 7, 5);
        let model = KernelModel::fit(&KernelSpec::rbf_median(), x.as_ref()).unwrap();
        let x3: Vec<f64> = (0..3).map(|i| x[(i, 3)]).collect();
        let v = model.kernel_vector(&x3).unwrap();
        for i in 0..7 {
            assert!((v[i] - model.gram()[(i, 3)]).abs() < 1e-15);
        }
        let far = vec![1e3, 1e3, 1e3];
        assert!(model.kernel_vector(&far).unwrap().iter().all(|&v| v < 1e-12));
        assert!(matches!(
            model.kernel_vector(&[0.0, 1.0]),
            Err(SarlError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn linear_kernel_vector_is_matrix_vector_product() {
        let x = random(4, 6, 6);
        let model = KernelModel::fit(&KernelSpec::Linear, x.as_ref()).unwrap();
        let q = [0.3, -0.2, 0.5, 1.0];
        let v = model.kernel_vector(&q).unwrap();
        for j in 0..6 {
            let direct: f64 = (0..4).map(|i| x[(i, j)] * q[i]).sum();
            assert!((v[j] - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn centered_kernel_vector_reproduces_centered_gram_columns() {
        let x = random(2, 6, 7);
        let model = KernelModel::fit(&KernelSpec::polynomial(3), x.as_ref()).unwrap();
        let x2: Vec<f64> = (0..2).map(|i| x[(i, 2)]).collect();
        let v = model.centered_kernel_vector(&x2).unwrap();
        for i in 0..6 {
            assert!((v[i] - model.centered_gram()[(i, 2)]).abs() < 1e-12);
        }
    }

    #[test]
    fn grams_are_psd() {
        let x = random(3, 12, 8);
        for spec in [KernelSpec::Linear, KernelSpec::polynomial(2), KernelSpec::rbf_median()] {
            let k = gram(&spec, x.as_ref()).unwrap();
            let e = sym_eig(k.as_ref()).unwrap();
            let largest = *e.values.last().unwrap();
            assert!(e.values[0] >= -1e-8 * largest, "{spec}");
        }
    }

    #[test]
    fn median_bandwidth_of_two_points() {
        let x = mat![[0.0, 3.0], [0.0, 4.0]];
        assert_eq!(median_heuristic(x.as_ref()).unwrap(), 5.0);
        assert!(matches!(
            gram(&KernelSpec::rbf_median(), Matrix::zeros(2, 0).as_ref()),
            Err(SarlError::EmptyInput(_))
        ));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(KernelSpec::Polynomial { degree: 0, coef0: 1.0 }.validate().is_err());
        assert!(KernelSpec::Rbf {
            bandwidth: Bandwidth::Fixed(-1.0)
        }
        .validate()
        .is_err());
    }
}

//! Post-hoc evaluation of embeddings: least-squares regressors, a softmax
//! classifier and reporting metrics.

use faer::MatRef;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarlError};
use crate::numerics::{center_columns, frobenius_sq, pseudo_inverse, sym_eig, Matrix, RankTolerance};
use crate::solver::Solution;

/// `t_hat = W z + b`
#[derive(Clone, Debug)]
pub struct LinearRegressor {
    /// `m x r`
    pub w: Matrix,
    pub b: Vec<f64>,
}

fn check_pair(z: MatRef<'_, f64>, t: MatRef<'_, f64>) -> Result<()> {
    if z.ncols() != t.ncols() {
        return Err(SarlError::shape(format!(
            "{} embeddings but {} targets",
            z.ncols(),
            t.ncols()
        )));
    }
    Ok(())
}

impl LinearRegressor {
    pub fn predict(&self, z: MatRef<'_, f64>) -> Result<Matrix> {
        if z.nrows() != self.w.ncols() {
            return Err(SarlError::shape(format!(
                "regressor expects {} inputs, got {}",
                self.w.ncols(),
                z.nrows()
            )));
        }
        let mut out = &self.w * z;
        for j in 0..out.ncols() {
            for i in 0..out.nrows() {
                out[(i, j)] += self.b[i];
            }
        }
        Ok(out)
    }

    /// `|T - W Z - b 1^T|_F^2 / n`
    pub fn mse(&self, z: MatRef<'_, f64>, t: MatRef<'_, f64>) -> Result<f64> {
        check_pair(z, t)?;
        if t.nrows() != self.b.len() {
            return Err(SarlError::shape("target rows do not match regressor outputs"));
        }
        let pred = self.predict(z)?;
        Ok(frobenius_sq((pred - t).as_ref()) / t.ncols() as f64)
    }
}

/// Minimum-norm least-squares fit with bias: `W = T~ pinv(Z~)`,
/// `b = mean(T) - W mean(Z)`.
pub fn fit_regressor(z: MatRef<'_, f64>, t: MatRef<'_, f64>) -> Result<LinearRegressor> {
    check_pair(z, t)?;
    if z.ncols() < 2 {
        return Err(SarlError::EmptyInput(format!("need at least 2 samples, got {}", z.ncols())));
    }
    let (zc, mz) = center_columns(z)?;
    let (tc, mt) = center_columns(t)?;
    let w = if z.nrows() == 0 {
        Matrix::zeros(t.nrows(), 0)
    } else {
        &tc * pseudo_inverse(zc.as_ref(), RankTolerance::default())?
    };
    let b = (0..t.nrows())
        .map(|i| mt[i] - (0..z.nrows()).map(|k| w[(i, k)] * mz[k]).sum::<f64>())
        .collect();
    Ok(LinearRegressor { w, b })
}

/// Least squares by plain gradient descent on standardized inputs with an
/// explicit bias, stopping when the gradient norm falls below `tol`.
/// Slow, but shares no code path with [`fit_regressor`].
pub fn fit_regressor_gd(
    z: MatRef<'_, f64>,
    t: MatRef<'_, f64>,
    max_iter: usize,
    tol: f64,
) -> Result<LinearRegressor> {
    check_pair(z, t)?;
    let (r, m, n) = (z.nrows(), t.nrows(), z.ncols());
    if n == 0 {
        return Err(SarlError::EmptyInput("no samples".into()));
    }
    // standardized augmented design [(z - mean) / scale; 1]
    let mean: Vec<f64> = (0..r).map(|i| (0..n).map(|j| z[(i, j)]).sum::<f64>() / n as f64).collect();
    let scale: Vec<f64> = (0..r)
        .map(|i| {
            let var = (0..n).map(|j| (z[(i, j)] - mean[i]).powi(2)).sum::<f64>() / n as f64;
            if var > 0.0 { var.sqrt() } else { 1.0 }
        })
        .collect();
    let a = Matrix::from_fn(r + 1, n, |i, j| if i < r { (z[(i, j)] - mean[i]) / scale[i] } else { 1.0 });
    let gram = &a * a.transpose() * (1.0 / n as f64);
    let top = sym_eig(gram.as_ref())?.spectral_norm();
    if top <= 0.0 {
        return Err(SarlError::Invariant("degenerate design".into()));
    }
    let step = 1.0 / top;
    let cross = t * a.transpose() * (1.0 / n as f64);
    let mut theta = Matrix::zeros(m, r + 1);
    for _ in 0..max_iter {
        let grad = &theta * &gram - &cross;
        if grad.norm_l2() < tol {
            break;
        }
        theta -= grad * step;
    }
    let w = Matrix::from_fn(m, r, |i, k| theta[(i, k)] / scale[k]);
    let b = (0..m)
        .map(|i| theta[(i, r)] - (0..r).map(|k| w[(i, k)] * mean[k]).sum::<f64>())
        .collect();
    Ok(LinearRegressor { w, b })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticHyper {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LogisticHyper {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 500,
            l2: 1e-4,
        }
    }
}

impl LogisticHyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(SarlError::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.l2 >= 0.0) || !self.l2.is_finite() {
            return Err(SarlError::InvalidConfig(format!("l2 must be non-negative, got {}", self.l2)));
        }
        Ok(())
    }
}

/// Affine input transform applied before the softmax layer: `W_in (z - mean)`,
/// where `W_in` whitens the training embeddings.
#[derive(Clone, Debug)]
struct Whitening {
    mean: Vec<f64>,
    transform: Matrix,
}

impl Whitening {
    fn fit(z: MatRef<'_, f64>) -> Result<Self> {
        let r = z.nrows();
        let (zc, mean) = center_columns(z)?;
        let cov = &zc * zc.transpose() * (1.0 / z.ncols() as f64);
        let eig = sym_eig(cov.as_ref())?;
        let largest = eig.values.last().copied().unwrap_or(0.0);
        let cutoff = RankTolerance::default().threshold(largest);
        let scale: Vec<f64> = eig
            .values
            .iter()
            .map(|&v| if largest > 0.0 && v > cutoff { 1.0 / v.sqrt() } else { 0.0 })
            .collect();
        let v = &eig.vectors;
        let scaled = Matrix::from_fn(r, r, |i, k| v[(i, k)] * scale[k]);
        Ok(Self {
            mean,
            transform: &scaled * v.transpose(),
        })
    }

    fn apply(&self, z: MatRef<'_, f64>) -> Matrix {
        let centered = Matrix::from_fn(z.nrows(), z.ncols(), |i, j| z[(i, j)] - self.mean[i]);
        &self.transform * centered
    }
}

/// Multinomial logistic regression trained by full-batch gradient descent
/// from zero initialization.
#[derive(Clone, Debug)]
pub struct LogisticClassifier {
    /// `classes x r`, acting on whitened inputs.
    pub w: Matrix,
    pub b: Vec<f64>,
    pub classes: usize,
    /// Regularized training loss after each epoch.
    pub loss_trace: Vec<f64>,
    /// The loss increased at some epoch.
    pub diverged: bool,
    /// Training labels had a single class; predictions are that class.
    pub degenerate: bool,
    whitening: Whitening,
}

impl LogisticClassifier {
    pub fn iterations(&self) -> usize {
        self.loss_trace.len()
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.loss_trace.last().copied()
    }

    fn logits(&self, features: MatRef<'_, f64>) -> Matrix {
        let mut out = &self.w * features;
        for j in 0..out.ncols() {
            for c in 0..self.classes {
                out[(c, j)] += self.b[c];
            }
        }
        out
    }

    /// Class probabilities, `classes x m`.
    pub fn predict_proba(&self, z: MatRef<'_, f64>) -> Result<Matrix> {
        self.check_dim(z)?;
        let mut p = self.logits(self.whitening.apply(z).as_ref());
        softmax_columns(&mut p);
        Ok(p)
    }

    /// Arg-max class per column, ties resolved to the lowest index.
    pub fn predict(&self, z: MatRef<'_, f64>) -> Result<Vec<usize>> {
        self.check_dim(z)?;
        let logits = self.logits(self.whitening.apply(z).as_ref());
        Ok((0..logits.ncols())
            .map(|j| {
                let mut best = 0;
                for c in 1..self.classes {
                    if logits[(c, j)] > logits[(best, j)] {
                        best = c;
                    }
                }
                best
            })
            .collect())
    }

    fn check_dim(&self, z: MatRef<'_, f64>) -> Result<()> {
        if z.nrows() != self.w.ncols() {
            return Err(SarlError::shape(format!(
                "classifier expects {} inputs, got {}",
                self.w.ncols(),
                z.nrows()
            )));
        }
        Ok(())
    }
}

fn softmax_columns(p: &mut Matrix) {
    for j in 0..p.ncols() {
        let top = (0..p.nrows()).map(|c| p[(c, j)]).fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for c in 0..p.nrows() {
            let e = (p[(c, j)] - top).exp();
            p[(c, j)] = e;
            total += e;
        }
        for c in 0..p.nrows() {
            p[(c, j)] /= total;
        }
    }
}

fn check_labels(labels: &[usize], classes: usize) -> Result<()> {
    if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
        return Err(SarlError::LabelOutOfRange { label: bad, classes });
    }
    Ok(())
}

/// Trains with the class count inferred as `max(label) + 1`.
pub fn fit_logistic(z: MatRef<'_, f64>, labels: &[usize], hyper: &LogisticHyper) -> Result<LogisticClassifier> {
    let classes = labels.iter().copied().max().map_or(1, |m| m + 1);
    fit_logistic_with_classes(z, labels, classes.max(2), hyper)
}

pub fn fit_logistic_with_classes(
    z: MatRef<'_, f64>,
    labels: &[usize],
    classes: usize,
    hyper: &LogisticHyper,
) -> Result<LogisticClassifier> {
    hyper.validate()?;
    let n = z.ncols();
    if labels.len() != n {
        return Err(SarlError::shape(format!("{n} embeddings but {} labels", labels.len())));
    }
    if n == 0 {
        return Err(SarlError::EmptyInput("no training samples".into()));
    }
    check_labels(labels, classes)?;
    let r = z.nrows();
    let whitening = Whitening::fit(z)?;

    let first = labels[0];
    if labels.iter().all(|&l| l == first) {
        log::warn!("logistic training labels contain a single class ({first}); using a constant classifier");
        let mut b = vec![0.0; classes];
        b[first] = 1.0;
        return Ok(LogisticClassifier {
            w: Matrix::zeros(classes, r),
            b,
            classes,
            loss_trace: Vec::new(),
            diverged: false,
            degenerate: true,
            whitening,
        });
    }

    let f = whitening.apply(z);
    let onehot = Matrix::from_fn(classes, n, |c, j| if labels[j] == c { 1.0 } else { 0.0 });
    let inv_n = 1.0 / n as f64;
    let mut clf = LogisticClassifier {
        w: Matrix::zeros(classes, r),
        b: vec![0.0; classes],
        classes,
        loss_trace: Vec::with_capacity(hyper.epochs),
        diverged: false,
        degenerate: false,
        whitening,
    };
    let mut previous = f64::INFINITY;
    for _ in 0..hyper.epochs {
        let mut p = clf.logits(f.as_ref());
        softmax_columns(&mut p);
        let residual = &p - &onehot;
        let grad_w = &residual * f.transpose() * inv_n + &clf.w * hyper.l2;
        let grad_b: Vec<f64> = (0..classes)
            .map(|c| (0..n).map(|j| residual[(c, j)]).sum::<f64>() * inv_n)
            .collect();
        clf.w -= grad_w * hyper.learning_rate;
        for c in 0..classes {
            clf.b[c] -= hyper.learning_rate * grad_b[c];
        }
        let loss = training_loss(&clf, f.as_ref(), labels, hyper.l2);
        if loss > previous + 1e-12 {
            clf.diverged = true;
        }
        previous = loss;
        clf.loss_trace.push(loss);
    }
    if clf.diverged {
        log::warn!("logistic training loss increased; consider a smaller learning rate");
    }
    Ok(clf)
}

fn training_loss(clf: &LogisticClassifier, f: MatRef<'_, f64>, labels: &[usize], l2: f64) -> f64 {
    let logits = clf.logits(f);
    let n = f.ncols();
    let mut total = 0.0;
    for j in 0..n {
        let top = (0..clf.classes).map(|c| logits[(c, j)]).fold(f64::NEG_INFINITY, f64::max);
        let lse = top + (0..clf.classes).map(|c| (logits[(c, j)] - top).exp()).sum::<f64>().ln();
        total += lse - logits[(labels[j], j)];
    }
    total / n as f64 + 0.5 * l2 * frobenius_sq(clf.w.as_ref())
}

/// Fraction of correctly classified columns of `z`.
pub fn accuracy(clf: &LogisticClassifier, z: MatRef<'_, f64>, labels: &[usize]) -> Result<f64> {
    if labels.is_empty() || z.ncols() == 0 {
        return Err(SarlError::EmptyInput("accuracy of an empty set".into()));
    }
    if labels.len() != z.ncols() {
        return Err(SarlError::shape(format!("{} embeddings but {} labels", z.ncols(), labels.len())));
    }
    let pred = clf.predict(z)?;
    let correct = pred.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(correct as f64 / labels.len() as f64)
}

/// Relative frequency of the most common label.
pub fn majority_prior(labels: &[usize]) -> Result<f64> {
    if labels.is_empty() {
        return Err(SarlError::EmptyInput("majority prior of no labels".into()));
    }
    let classes = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut counts = vec![0usize; classes];
    for &l in labels {
        counts[l] += 1;
    }
    Ok(*counts.iter().max().unwrap() as f64 / labels.len() as f64)
}

/// Gap between adversary accuracy and the random-guess rate.
pub fn delta_star(adversary_accuracy: f64, majority_prior: f64) -> f64 {
    (adversary_accuracy - majority_prior).abs()
}

/// One row of a trade-off curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub lambda: f64,
    pub r: usize,
    pub target_loss: f64,
    pub adversary_loss: f64,
    pub target_accuracy: Option<f64>,
    pub adversary_accuracy: Option<f64>,
}

impl TradeoffPoint {
    pub fn from_solution(solution: &Solution) -> Self {
        Self {
            lambda: solution.lambda,
            r: solution.encoder.dim(),
            target_loss: solution.objectives.target_loss,
            adversary_loss: solution.objectives.adversary_loss,
            target_accuracy: None,
            adversary_accuracy: None,
        }
    }
}

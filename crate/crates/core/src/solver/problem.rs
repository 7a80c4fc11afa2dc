use faer::MatRef;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarlError};
use crate::kernels::KernelModel;
use crate::numerics::{
    center_columns, frobenius_sq, orthonormal_range, psd_factor, pseudo_inverse, Matrix,
    RankTolerance,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Linear,
    Kernel,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Linear => write!(f, "linear"),
            Mode::Kernel => write!(f, "kernel"),
        }
    }
}

/// Minimum mean squared errors of the best linear target predictor and the
/// best linear adversary for a given encoder subspace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    /// `J_y`
    pub target_loss: f64,
    /// `J_s`
    pub adversary_loss: f64,
}

/// Everything the spectral solver needs from one training set.
///
/// `basis` (`L_x`, `n x rho`) is an orthonormal basis of the centered data's
/// sample space: the range of `X~^T` in linear mode or of the centered Gram
/// matrix in kernel mode. All encoder subspaces are expressed in its
/// coordinates.
#[derive(Clone, Debug)]
pub struct Problem {
    mode: Mode,
    basis: Matrix,
    target: Matrix,
    sensitive: Matrix,
    target_in_basis: Matrix,
    sensitive_in_basis: Matrix,
    coordinate_map: Matrix,
    recovery_factor: Option<Matrix>,
    mean_x: Vec<f64>,
    mean_y: Vec<f64>,
    mean_s: Vec<f64>,
    target_sq_norm: f64,
    sensitive_sq_norm: f64,
    kernel: Option<KernelModel>,
    tol: RankTolerance,
}

fn check_columns(n: usize, y: MatRef<'_, f64>, s: MatRef<'_, f64>) -> Result<()> {
    if y.ncols() != n || s.ncols() != n {
        return Err(SarlError::shape(format!(
            "data has {n} samples but targets have {} and sensitive attributes {}",
            y.ncols(),
            s.ncols()
        )));
    }
    if n < 2 {
        return Err(SarlError::EmptyInput(format!("need at least 2 samples, got {n}")));
    }
    Ok(())
}

/// Builds the linear-encoder problem from column-sample matrices
/// `x` (`d x n`), `y` (`p x n`) and `s` (`q x n`).
pub fn build_problem_linear(
    x: MatRef<'_, f64>,
    y: MatRef<'_, f64>,
    s: MatRef<'_, f64>,
    tol: RankTolerance,
) -> Result<Problem> {
    check_columns(x.ncols(), y, s)?;
    let (xc, mean_x) = center_columns(x)?;
    let basis = orthonormal_range(xc.transpose(), tol)?;
    let recovery = pseudo_inverse(xc.as_ref(), tol)?;
    let coordinate_map = basis.transpose() * &recovery;
    Problem::assemble(
        Mode::Linear,
        basis,
        coordinate_map,
        Some(recovery),
        mean_x,
        y,
        s,
        None,
        tol,
    )
}

/// Builds the kernel-encoder problem. The range basis and the pseudo-inverse
/// of the centered Gram matrix come from one eigendecomposition.
pub fn build_problem_kernel(
    model: KernelModel,
    y: MatRef<'_, f64>,
    s: MatRef<'_, f64>,
    tol: RankTolerance,
) -> Result<Problem> {
    check_columns(model.n_samples(), y, s)?;
    let factor = psd_factor(model.centered_gram().as_ref(), tol)?;
    let coordinate_map = factor.basis_times_pinv();
    let mean_x = crate::numerics::row_means(model.train_x().as_ref());
    Problem::assemble(
        Mode::Kernel,
        factor.basis,
        coordinate_map,
        None,
        mean_x,
        y,
        s,
        Some(model),
        tol,
    )
}

impl Problem {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        mode: Mode,
        basis: Matrix,
        coordinate_map: Matrix,
        recovery_factor: Option<Matrix>,
        mean_x: Vec<f64>,
        y: MatRef<'_, f64>,
        s: MatRef<'_, f64>,
        kernel: Option<KernelModel>,
        tol: RankTolerance,
    ) -> Result<Self> {
        let (target, mean_y) = center_columns(y)?;
        let (sensitive, mean_s) = center_columns(s)?;
        let target_in_basis = &target * &basis;
        let sensitive_in_basis = &sensitive * &basis;
        Ok(Self {
            mode,
            target_sq_norm: frobenius_sq(target.as_ref()),
            sensitive_sq_norm: frobenius_sq(sensitive.as_ref()),
            basis,
            target,
            sensitive,
            target_in_basis,
            sensitive_in_basis,
            coordinate_map,
            recovery_factor,
            mean_x,
            mean_y,
            mean_s,
            kernel,
            tol,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n_samples(&self) -> usize {
        self.basis.nrows()
    }

    /// Dimension `rho` of the sample-space basis.
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn input_dim(&self) -> usize {
        self.mean_x.len()
    }

    /// `L_x`
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Centered targets `Y~`.
    pub fn target(&self) -> &Matrix {
        &self.target
    }

    /// Centered sensitive attributes `S~`.
    pub fn sensitive(&self) -> &Matrix {
        &self.sensitive
    }

    /// `Y~ L_x`
    pub fn target_in_basis(&self) -> &Matrix {
        &self.target_in_basis
    }

    /// `S~ L_x`
    pub fn sensitive_in_basis(&self) -> &Matrix {
        &self.sensitive_in_basis
    }

    /// `L_x^T` times the pseudo-inverse of `X~` (linear) or of the centered
    /// Gram matrix (kernel). Encoder parameters are `G_E^T` times this.
    pub fn coordinate_map(&self) -> &Matrix {
        &self.coordinate_map
    }

    /// `pinv(X~)` in linear mode. Kernel mode never materializes the
    /// `n x n` pseudo-inverse; see [`Problem::coordinate_map`].
    pub fn recovery_factor(&self) -> Option<&Matrix> {
        self.recovery_factor.as_ref()
    }

    pub fn mean_x(&self) -> &[f64] {
        &self.mean_x
    }

    pub fn mean_y(&self) -> &[f64] {
        &self.mean_y
    }

    pub fn mean_s(&self) -> &[f64] {
        &self.mean_s
    }

    pub fn kernel(&self) -> Option<&KernelModel> {
        self.kernel.as_ref()
    }

    pub fn rank_tolerance(&self) -> RankTolerance {
        self.tol
    }

    /// `|Y~^T|_F^2 / n`, the target loss of the zero encoder.
    pub fn target_variance(&self) -> f64 {
        self.target_sq_norm / self.n_samples() as f64
    }

    /// `|S~^T|_F^2 / n`, the adversary loss of the zero encoder.
    pub fn sensitive_variance(&self) -> f64 {
        self.sensitive_sq_norm / self.n_samples() as f64
    }

    /// `J_y` and `J_s` of the encoder spanned by the column-orthonormal
    /// `g` (`rho x r`), computed as `(|Y~^T|^2 - |Y~ L_x G|^2) / n` without
    /// forming any `n x n` projector.
    pub fn objectives(&self, g: MatRef<'_, f64>) -> Result<Objectives> {
        if g.nrows() != self.rank() {
            return Err(SarlError::shape(format!(
                "encoder basis has {} rows, problem rank is {}",
                g.nrows(),
                self.rank()
            )));
        }
        let n = self.n_samples() as f64;
        if g.ncols() == 0 {
            return Ok(Objectives {
                target_loss: self.target_sq_norm / n,
                adversary_loss: self.sensitive_sq_norm / n,
            });
        }
        let ty = &self.target_in_basis * g;
        let ts = &self.sensitive_in_basis * g;
        Ok(Objectives {
            target_loss: (self.target_sq_norm - frobenius_sq(ty.as_ref())) / n,
            adversary_loss: (self.sensitive_sq_norm - frobenius_sq(ts.as_ref())) / n,
        })
    }

    /// Flips columns of `g` so that the largest-magnitude entry of each
    /// sample-space direction `L_x g_k` is positive. Makes encoders from
    /// different bases of the same space comparable.
    pub fn canonicalize_signs(&self, g: &mut Matrix) {
        if g.ncols() == 0 {
            return;
        }
        let m = &self.basis * &*g;
        for k in 0..g.ncols() {
            let mut best = 0.0_f64;
            for i in 0..m.nrows() {
                if m[(i, k)].abs() > best.abs() {
                    best = m[(i, k)];
                }
            }
            if best < 0.0 {
                for i in 0..g.nrows() {
                    g[(i, k)] = -g[(i, k)];
                }
            }
        }
    }
}

/// Free-function form of [`Problem::objectives`].
pub fn objectives(problem: &Problem, g: MatRef<'_, f64>) -> Result<Objectives> {
    problem.objectives(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use crate::numerics::frobenius;
    use faer::mat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn two_points_give_rank_one() {
        let x = Matrix::identity(2, 2);
        let y = mat![[1.0, 0.0]];
        let s = mat![[0.0, 1.0]];
        let p = build_problem_linear(x.as_ref(), y.as_ref(), s.as_ref(), RankTolerance::default())
            .unwrap();
        assert_eq!(p.rank(), 1);
    }

    #[test]
    fn constant_row_adds_nothing() {
        let mut x = random(3, 20, 1);
        for j in 0..20 {
            x[(2, j)] = 7.0;
        }
        let y = random(1, 20, 2);
        let p = build_problem_linear(x.as_ref(), y.as_ref(), y.as_ref(), RankTolerance::default())
            .unwrap();
        assert_eq!(p.rank(), 2);
    }

    #[test]
    fn full_rank_basis_projects_data() {
        let x = random(10, 50, 3);
        let y = random(2, 50, 4);
        let s = random(1, 50, 5);
        let p = build_problem_linear(x.as_ref(), y.as_ref(), s.as_ref(), RankTolerance::default())
            .unwrap();
        assert_eq!(p.rank(), 10);
        let (xc, _) = center_columns(x.as_ref()).unwrap();
        let xt = xc.transpose().to_owned();
        let proj = p.basis() * (p.basis().transpose() * &xt);
        assert!(frobenius((&proj - &xt).as_ref()) < 1e-10 * frobenius(xt.as_ref()));
        let gram = p.basis().transpose() * p.basis();
        assert!(frobenius((&gram - Matrix::identity(10, 10)).as_ref()) < 1e-10);
    }

    #[test]
    fn column_mismatch_and_too_few_samples() {
        let x = random(2, 5, 6);
        let y = random(1, 4, 7);
        assert!(matches!(
            build_problem_linear(x.as_ref(), y.as_ref(), y.as_ref(), RankTolerance::default()),
            Err(SarlError::ShapeMismatch(_))
        ));
        let x1 = random(2, 1, 8);
        let y1 = random(1, 1, 9);
        assert!(matches!(
            build_problem_linear(x1.as_ref(), y1.as_ref(), y1.as_ref(), RankTolerance::default()),
            Err(SarlError::EmptyInput(_))
        ));
    }

    #[test]
    fn constant_feature_map_gives_empty_basis() {
        let x = Matrix::from_fn(2, 6, |_, _| 1.0);
        let model = KernelModel::fit(&KernelSpec::Linear, x.as_ref()).unwrap();
        let y = random(1, 6, 10);
        let p = build_problem_kernel(model, y.as_ref(), y.as_ref(), RankTolerance::default())
            .unwrap();
        assert_eq!(p.rank(), 0);
        let o = p.objectives(Matrix::zeros(0, 0).as_ref()).unwrap();
        assert!((o.target_loss - p.target_variance()).abs() < 1e-15);
    }

    #[test]
    fn rbf_on_distinct_points_loses_one_dimension() {
        let x = random(2, 20, 11);
        let model = KernelModel::fit(&KernelSpec::rbf_median(), x.as_ref()).unwrap();
        let y = random(1, 20, 12);
        let p = build_problem_kernel(model, y.as_ref(), y.as_ref(), RankTolerance::default())
            .unwrap();
        assert_eq!(p.rank(), 19);
    }

    #[test]
    fn objectives_of_empty_and_full_basis() {
        let x = random(3, 30, 13);
        let y = random(2, 30, 14);
        let s = random(1, 30, 15);
        let p = build_problem_linear(x.as_ref(), y.as_ref(), s.as_ref(), RankTolerance::default())
            .unwrap();
        let empty = p.objectives(Matrix::zeros(3, 0).as_ref()).unwrap();
        assert_eq!(empty.target_loss, p.target_variance());
        assert_eq!(empty.adversary_loss, p.sensitive_variance());
        let full = p.objectives(Matrix::identity(3, 3).as_ref()).unwrap();
        let yl = frobenius_sq(p.target_in_basis().as_ref());
        let gamma_min = p.target_variance() - yl / 30.0;
        assert!((full.target_loss - gamma_min).abs() < 1e-14);
        assert!(p.objectives(Matrix::zeros(2, 1).as_ref()).is_err());
    }
}

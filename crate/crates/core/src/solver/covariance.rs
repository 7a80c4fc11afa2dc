//! Population-moment form of the linear problem.
//!
//! This path assumes a positive definite input covariance and works with the
//! Cholesky factor `Q_x` (`Q_x^T Q_x = C_x`). It serves as an independent
//! cross-check of the empirical-moment solver in [`super::problem`].

use faer::MatRef;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarlError};
use crate::numerics::{
    center_columns, cholesky, frobenius_sq, orthonormal_range, solve_upper_transposed, Matrix,
    RankTolerance,
};

use super::spectral::check_lambda;

/// Which variable a regressor predicts from the embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Target,
    Sensitive,
    Input,
}

#[derive(Clone, Debug)]
pub struct CovarianceModel {
    pub c_x: Matrix,
    /// `d x p`
    pub c_xy: Matrix,
    /// `d x q`
    pub c_xs: Matrix,
    pub c_y: Matrix,
    pub c_s: Matrix,
    /// Upper-triangular Cholesky factor of `c_x`.
    pub q_x: Matrix,
    pub mean_x: Vec<f64>,
    pub mean_y: Vec<f64>,
    pub mean_s: Vec<f64>,
    tol: RankTolerance,
}

impl CovarianceModel {
    /// Empirical moments (normalized by `n`) of column-sample data.
    pub fn from_data(
        x: MatRef<'_, f64>,
        y: MatRef<'_, f64>,
        s: MatRef<'_, f64>,
        tol: RankTolerance,
    ) -> Result<Self> {
        let n = x.ncols();
        if y.ncols() != n || s.ncols() != n {
            return Err(SarlError::shape("x, y and s must have the same number of columns"));
        }
        let (xc, mean_x) = center_columns(x)?;
        let (yc, mean_y) = center_columns(y)?;
        let (sc, mean_s) = center_columns(s)?;
        let inv_n = 1.0 / n as f64;
        let mut model = Self::from_moments(
            &xc * xc.transpose() * inv_n,
            &xc * yc.transpose() * inv_n,
            &xc * sc.transpose() * inv_n,
            &yc * yc.transpose() * inv_n,
            &sc * sc.transpose() * inv_n,
            tol,
        )?;
        model.mean_x = mean_x;
        model.mean_y = mean_y;
        model.mean_s = mean_s;
        Ok(model)
    }

    pub fn from_moments(
        c_x: Matrix,
        c_xy: Matrix,
        c_xs: Matrix,
        c_y: Matrix,
        c_s: Matrix,
        tol: RankTolerance,
    ) -> Result<Self> {
        let d = c_x.nrows();
        if c_xy.nrows() != d || c_xs.nrows() != d {
            return Err(SarlError::shape("cross-covariances must have d rows"));
        }
        if c_y.nrows() != c_xy.ncols() || c_s.nrows() != c_xs.ncols() {
            return Err(SarlError::shape("label covariances do not match cross-covariances"));
        }
        let q_x = cholesky(c_x.as_ref(), tol)?;
        Ok(Self {
            c_x,
            c_xy,
            c_xs,
            c_y,
            c_s,
            q_x,
            mean_x: vec![0.0; d],
            mean_y: Vec::new(),
            mean_s: Vec::new(),
            tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.c_x.nrows()
    }

    /// `Q_x^{-T} C_xt`
    fn whitened_cross(&self, target: Target) -> Matrix {
        let cross = match target {
            Target::Target => self.c_xy.as_ref(),
            Target::Sensitive => self.c_xs.as_ref(),
            Target::Input => self.c_x.as_ref(),
        };
        solve_upper_transposed(self.q_x.as_ref(), cross)
    }

    fn trace_of(&self, target: Target) -> f64 {
        let c = match target {
            Target::Target => &self.c_y,
            Target::Sensitive => &self.c_s,
            Target::Input => &self.c_x,
        };
        (0..c.nrows()).map(|i| c[(i, i)]).sum()
    }
}

/// `B = L_x^T Q_x^{-T} (lambda C_sx^T C_sx - (1 - lambda) C_yx^T C_yx) Q_x^{-1} L_x`.
///
/// `Q_x` is full rank, so its column space is all of `R^d` and `L_x = I`.
pub fn build_b_covariance(cov: &CovarianceModel, lambda: f64) -> Result<Matrix> {
    check_lambda(lambda)?;
    let ws = cov.whitened_cross(Target::Sensitive);
    let wy = cov.whitened_cross(Target::Target);
    Ok(&ws * ws.transpose() * lambda - &wy * wy.transpose() * (1.0 - lambda))
}

/// Minimum MSE of a linear regressor (with bias) predicting `target` from
/// `z = Theta_E x`: `Tr[C_t] - |P_M Q_x^{-T} C_xt|_F^2` with `M = Q_x Theta_E^T`.
pub fn min_mse_given_encoder(
    cov: &CovarianceModel,
    theta: MatRef<'_, f64>,
    target: Target,
) -> Result<f64> {
    if theta.ncols() != cov.dim() {
        return Err(SarlError::shape(format!(
            "encoder has {} columns, data dimension is {}",
            theta.ncols(),
            cov.dim()
        )));
    }
    let total = cov.trace_of(target);
    if theta.nrows() == 0 {
        return Ok(total);
    }
    let m = &cov.q_x * theta.transpose();
    let basis = orthonormal_range(m.as_ref(), cov.tol)?;
    if basis.ncols() == 0 {
        return Ok(total);
    }
    let w = cov.whitened_cross(target);
    let projected = basis.transpose() * &w;
    Ok(total - frobenius_sq(projected.as_ref()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{frobenius, sym_eig};
    use faer::mat;

    fn white() -> CovarianceModel {
        CovarianceModel::from_moments(
            Matrix::identity(2, 2),
            mat![[0.8], [0.1]],
            mat![[0.2], [0.6]],
            mat![[1.0]],
            mat![[1.0]],
            RankTolerance::default(),
        )
        .unwrap()
    }

    #[test]
    fn whitened_b_is_plain_cross_covariance_form() {
        let cov = white();
        assert!(frobenius((&cov.q_x - Matrix::identity(2, 2)).as_ref()) < 1e-15);
        let b = build_b_covariance(&cov, 0.3).unwrap();
        let expected = &cov.c_xs * cov.c_xs.transpose() * 0.3
            - &cov.c_xy * cov.c_xy.transpose() * 0.7;
        assert!(frobenius((&b - &expected).as_ref()) < 1e-15);
    }

    #[test]
    fn scalar_target_at_lambda_zero_has_one_negative_eigenvalue() {
        let cov = white();
        let b = build_b_covariance(&cov, 0.0).unwrap();
        let e = sym_eig(b.as_ref()).unwrap();
        let expected = -(0.8_f64 * 0.8 + 0.1 * 0.1);
        assert!((e.values[0] - expected).abs() < 1e-14);
        assert!(e.values[1].abs() < 1e-14);
    }

    #[test]
    fn zero_encoder_and_identity_reconstruction() {
        let cov = white();
        let zero = Matrix::zeros(1, 2);
        assert!((min_mse_given_encoder(&cov, zero.as_ref(), Target::Target).unwrap() - 1.0).abs() < 1e-15);
        let id = Matrix::identity(2, 2);
        assert!(min_mse_given_encoder(&cov, id.as_ref(), Target::Input).unwrap().abs() < 1e-14);
    }

    #[test]
    fn singular_covariance_rejected() {
        let r = CovarianceModel::from_moments(
            mat![[1.0, 1.0], [1.0, 1.0]],
            mat![[0.0], [0.0]],
            mat![[0.0], [0.0]],
            mat![[1.0]],
            mat![[1.0]],
            RankTolerance::default(),
        );
        assert!(matches!(r, Err(SarlError::NotPositiveDefinite { .. })));
    }
}

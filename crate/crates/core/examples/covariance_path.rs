//! Closed-form regression loss from second moments alone, checked against
//! fitted least-squares regressors on the samples.
//!
//!     cargo run --release --example covariance_path

use sarl::data::gen_gaussian_mixture;
use sarl::eval::fit_regressor;
use sarl::numerics::{sym_eig, Matrix, RankTolerance};
use sarl::solver::{build_b_covariance, min_mse_given_encoder, CovarianceModel, Target};

fn main() -> sarl::Result<()> {
    let data = gen_gaussian_mixture(2000, 3)?;
    let tol = RankTolerance::default();
    let cov = CovarianceModel::from_data(data.x.as_ref(), data.y.as_ref(), data.s.as_ref(), tol)?;

    for lambda in [0.0, 0.5, 1.0] {
        let eig = sym_eig(build_b_covariance(&cov, lambda)?.as_ref())?;
        println!("lambda {lambda}: eigenvalues {:?}", eig.values);
    }

    let encoders = [
        ("first coordinate", Matrix::from_fn(1, 3, |_, j| f64::from(j == 0))),
        ("x0 - x1", Matrix::from_fn(1, 3, |_, j| [1.0, -1.0, 0.0][j])),
        ("identity", Matrix::identity(3, 3)),
    ];
    for (name, theta) in encoders {
        let z = &theta * &data.x;
        for (target, labels, t) in [("shape", &data.y, Target::Target), ("color", &data.s, Target::Sensitive)] {
            let closed = min_mse_given_encoder(&cov, theta.as_ref(), t)?;
            let fitted = fit_regressor(z.as_ref(), labels.as_ref())?.mse(z.as_ref(), labels.as_ref())?;
            println!("{name:>16} -> {target}: closed form {closed:.8} fitted {fitted:.8}");
        }
    }
    Ok(())
}

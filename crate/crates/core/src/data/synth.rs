use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Result, SarlError};
use crate::numerics::Matrix;

use super::table::{AttributeColumn, DatasetSchema, FeatureColumn};
use super::Dataset;

/// Component means, in the order blue circle, red circle, blue cross, red cross.
pub const MIXTURE_MEANS: [[f64; 3]; 4] = [[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [2.0, 2.5, 0.0], [2.5, 3.0, 0.0]];
/// Per-coordinate standard deviation shared by all components.
pub const MIXTURE_SIGMA: f64 = 0.3;

const SHAPES: [&str; 2] = ["circle", "cross"];
const COLORS: [&str; 2] = ["blue", "red"];

/// Four-component isotropic Gaussian mixture in three dimensions. Sample `i`
/// comes from component `i % 4`; the target is the shape and the sensitive
/// attribute is the color, both one-hot.
pub fn gen_gaussian_mixture(n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 || !n.is_multiple_of(4) {
        return Err(SarlError::InvalidCount { count: n, multiple_of: 4 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, MIXTURE_SIGMA).expect("valid sigma");
    let mut x = Matrix::zeros(3, n);
    let mut y = Matrix::zeros(2, n);
    let mut s = Matrix::zeros(2, n);
    for j in 0..n {
        let component = j % 4;
        for i in 0..3 {
            x[(i, j)] = MIXTURE_MEANS[component][i] + noise.sample(&mut rng);
        }
        y[(component / 2, j)] = 1.0;
        s[(component % 2, j)] = 1.0;
    }
    let schema = DatasetSchema {
        standardize: false,
        features: (0..3)
            .map(|i| FeatureColumn::numeric(format!("x{i}")))
            .collect(),
        target: vec![AttributeColumn::categorical("shape", SHAPES.iter().map(|s| s.to_string()).collect())],
        sensitive: vec![AttributeColumn::categorical("color", COLORS.iter().map(|s| s.to_string()).collect())],
    };
    Ok(Dataset { x, y, s, schema })
}

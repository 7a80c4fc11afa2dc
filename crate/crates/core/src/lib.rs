//! Closed-form adversarial representation learning.
//!
//! Finds the globally optimal linear or kernel encoder that trades off
//! predicting a target against hiding a sensitive attribute from a linear
//! adversary, by eigendecomposition of a single symmetric matrix.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod kernels;
pub mod numerics;
pub mod solver;

pub use error::{Result, SarlError};

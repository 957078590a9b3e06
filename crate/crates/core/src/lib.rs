//! Contrastive subspace recovery from positive pairs.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`, which is what the benchmark
//! harness uses.

pub mod error;
pub mod estimators;
pub mod factor_model;
pub mod linalg;
pub mod metrics;
pub mod scalar;
pub mod theory;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision dense matrix.
pub type Matrix = linalg::Mat<f64>;
/// Double-precision symmetric matrix.
pub type SymMatrix = linalg::SymmetricMatrix<f64>;
pub type Eigen = linalg::EigenDecomposition<f64>;
pub type GeneralizedEigen = linalg::GeneralizedEigenResult<f64>;
pub type ModelSpec = factor_model::FactorModelSpec<f64>;
pub type ModelLoadings = factor_model::Loadings<f64>;
pub type Dataset = factor_model::PairedDataset<f64>;
pub type Estimate = estimators::SubspaceEstimate<f64>;
pub type AngleSet = metrics::PrincipalAngleSet<f64>;

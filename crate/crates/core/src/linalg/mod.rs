//! Dense linear algebra: matrices, symmetric eigendecomposition and the
//! truncated generalized eigensolver.

pub mod eigen;
pub mod generalized;
pub(crate) mod krylov;
pub mod matrix;
pub mod qr;
pub mod svd;
pub mod tridiagonal;

pub use eigen::{
    normalize_signs, sym_eig, sym_eig_top, sym_eig_values, truncate_rank, EigenDecomposition,
    SymmetricMatrix,
};
pub use generalized::{
    generalized_eig, generalized_eig_top, GeneralizedEigenResult, Whitening, DEFAULT_EPS_REL,
};
pub use matrix::Mat;

//! Subspace estimators: PCA, PCA+ (alignment only), PCA++ (hard uniformity)
//! and the cPCA, cPCA++ and CCA baselines.

mod baselines;
mod contrastive;
pub mod covariance;
pub mod routes;

use std::fmt;
use std::str::FromStr;

use crate::linalg::Mat;

pub use baselines::{cca_top_k, cpca, cpca_pp};
pub use contrastive::{pca, pca_from_data, pca_plus, pca_plus_plus, pca_plus_plus_matrices};
pub use covariance::{contrastive_cov, sample_cov, synthesize_fg_bg, CovariancePair};

/// Which normalization the returned basis satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintTag {
    /// `VᵀV = I`.
    Orthonormal,
    /// `Vᵀ (S)ₛ V = I` for the truncated constraint covariance.
    SOrthonormal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Pca,
    PcaPlus,
    PcaPlusPlus,
    Cpca,
    CpcaPlusPlus,
    Cca,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Pca,
        Method::PcaPlus,
        Method::PcaPlusPlus,
        Method::Cpca,
        Method::CpcaPlusPlus,
        Method::Cca,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::PcaPlus => "pca_plus",
            Method::PcaPlusPlus => "pca_plus_plus",
            Method::Cpca => "cpca",
            Method::CpcaPlusPlus => "cpca_pp",
            Method::Cca => "cca",
        }
    }

    /// Whether the method takes a truncation rank.
    pub fn is_truncated(self) -> bool {
        matches!(self, Method::PcaPlusPlus | Method::CpcaPlusPlus)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let m = match s {
            "pca" => Method::Pca,
            "pca_plus" | "pca+" => Method::PcaPlus,
            "pca_plus_plus" | "pca++" => Method::PcaPlusPlus,
            "cpca" => Method::Cpca,
            "cpca_pp" | "cpca++" => Method::CpcaPlusPlus,
            "cca" => Method::Cca,
            other => return Err(format!("unknown method `{other}`")),
        };
        Ok(m)
    }
}

/// Solver output that accompanies a basis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics<T> {
    /// Leading eigenvalues, generalized eigenvalues or canonical
    /// correlations, non-increasing.
    pub values: Vec<T>,
    pub eps_used: Option<T>,
    pub truncation_rank: Option<usize>,
    pub retained_rank: Option<usize>,
}

/// A `d x k` basis for an estimated subspace.
#[derive(Clone, Debug)]
pub struct SubspaceEstimate<T> {
    pub basis: Mat<T>,
    pub constraint: ConstraintTag,
    pub method: Method,
    pub diagnostics: Diagnostics<T>,
}

/// Truncation rank used when none is given: `min(d, max(2k, ceil(d / 10)))`.
pub fn default_truncation(d: usize, k: usize) -> usize {
    d.min((2 * k).max(d.div_ceil(10)))
}

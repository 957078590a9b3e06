//! Regularized symmetric-definite generalized eigensolver.
//!
//! Solves `S⁺ v = λ (S)ₛ v` where `(S)ₛ` is the rank-`s` spectral
//! truncation of `S`: whiten with the retained eigenpairs of `S`, solve the
//! small projected problem, and map the eigenvectors back.

use crate::error::{invalid, Error, Result};
use crate::linalg::eigen::{normalize_signs, sym_eig, sym_eig_top, SymmetricMatrix};
use crate::linalg::matrix::Mat;
use crate::scalar::Real;

/// Default relative regularizer: `eps = 1e-10 * λ₁(S)`.
pub const DEFAULT_EPS_REL: f64 = 1e-10;

/// Generalized eigenpairs in descending order with `(S)ₛ`-orthonormal
/// eigenvectors (`d x r`, `r` = number of directions actually returned).
#[derive(Clone, Debug)]
pub struct GeneralizedEigenResult<T> {
    pub values: Vec<T>,
    pub vectors: Mat<T>,
    /// Absolute regularizer added to the retained eigenvalues of `S`.
    pub eps_used: T,
    /// Requested truncation rank `s`.
    pub truncation_rank: usize,
    /// Number of directions of `S` that survived truncation and exclusion.
    pub retained_rank: usize,
}

/// Whitening map `R = V_r (Λ_r + εI)^{-1/2}` built from the leading
/// eigenpairs of the constraint matrix.
///
/// Directions whose eigenvalue plus `ε` is not positive are dropped, so with
/// `eps_rel = 0` the exact null space of the truncated matrix never enters.
#[derive(Clone, Debug)]
pub struct Whitening<T> {
    transform: Mat<T>,
    eps_used: T,
    truncation_rank: usize,
}

impl<T: Real> Whitening<T> {
    /// `values` (descending) and `vectors` (`d x s`, columns) are the top-`s`
    /// eigenpairs of the constraint matrix.
    pub fn from_eigenpairs(values: &[T], vectors: &Mat<T>, eps_rel: T) -> Result<Self> {
        let s = values.len();
        assert_eq!(vectors.cols(), s, "one eigenvector per eigenvalue");
        if !(eps_rel >= T::zero()) || !eps_rel.is_finite() {
            return Err(invalid(format!(
                "eps_rel must be a finite nonnegative number, got {eps_rel}"
            )));
        }
        let lambda1 = values.first().copied().unwrap_or(T::zero());
        if !(lambda1 > T::zero()) {
            return Err(Error::DegenerateCovariance(format!(
                "largest eigenvalue of the constraint matrix is {lambda1}, no positive variance"
            )));
        }
        let eps = eps_rel * lambda1;
        let keep: Vec<usize> = (0..s).filter(|&j| values[j] + eps > T::zero()).collect();
        let mut transform = vectors.select_columns(&keep);
        let factors: Vec<T> = keep
            .iter()
            .map(|&j| (values[j] + eps).sqrt().recip())
            .collect();
        transform.scale_columns(&factors);
        Ok(Self {
            transform,
            eps_used: eps,
            truncation_rank: s,
        })
    }

    /// Eigendecomposes `s` (top `rank` pairs) and builds the whitening map.
    pub fn from_matrix(s: &SymmetricMatrix<T>, rank: usize, eps_rel: T) -> Result<Self> {
        let d = s.dim();
        if rank == 0 || rank > d {
            return Err(invalid(format!("truncation rank {rank} outside 1..={d}")));
        }
        let eig = if rank == d {
            sym_eig(s)?
        } else {
            sym_eig_top(s, rank)?
        };
        Self::from_eigenpairs(&eig.values, &eig.vectors, eps_rel)
    }

    /// The `d x r` map `R`.
    pub fn transform(&self) -> &Mat<T> {
        &self.transform
    }

    pub fn rank(&self) -> usize {
        self.transform.cols()
    }

    pub fn eps_used(&self) -> T {
        self.eps_used
    }

    /// `Rᵀ A R` for a dense symmetric `A`.
    pub fn project(&self, a: &SymmetricMatrix<T>) -> Result<SymmetricMatrix<T>> {
        if a.dim() != self.transform.rows() {
            return Err(invalid(format!(
                "matrix of dimension {} does not match whitening dimension {}",
                a.dim(),
                self.transform.rows()
            )));
        }
        let ar = a.as_mat().matmul(&self.transform);
        SymmetricMatrix::new(self.transform.t_matmul(&ar))
    }

    /// Finishes the solve from the projected matrix `M = Rᵀ S⁺ R`, keeping
    /// the leading `count` pairs (all of them when `count` is `None`).
    pub fn solve(
        &self,
        projected: &SymmetricMatrix<T>,
        count: Option<usize>,
    ) -> Result<GeneralizedEigenResult<T>> {
        let r = self.rank();
        if projected.dim() != r {
            return Err(invalid(format!(
                "projected matrix has dimension {}, expected {r}",
                projected.dim()
            )));
        }
        let want = count.unwrap_or(r).min(r);
        let eig = if want == r {
            sym_eig(projected)?
        } else {
            sym_eig_top(projected, want)?
        };
        let mut vectors = self.transform.matmul(&eig.vectors);
        normalize_signs(&mut vectors);
        Ok(GeneralizedEigenResult {
            values: eig.values,
            vectors,
            eps_used: self.eps_used,
            truncation_rank: self.truncation_rank,
            retained_rank: r,
        })
    }
}

/// Generalized eigenpairs of `(S⁺, (S)ₛ)`, all retained directions.
pub fn generalized_eig<T: Real>(
    s_plus: &SymmetricMatrix<T>,
    s: &SymmetricMatrix<T>,
    rank: usize,
    eps_rel: T,
) -> Result<GeneralizedEigenResult<T>> {
    generalized_eig_top(s_plus, s, rank, eps_rel, None)
}

/// As [`generalized_eig`], but only the leading `count` pairs are computed.
pub fn generalized_eig_top<T: Real>(
    s_plus: &SymmetricMatrix<T>,
    s: &SymmetricMatrix<T>,
    rank: usize,
    eps_rel: T,
    count: Option<usize>,
) -> Result<GeneralizedEigenResult<T>> {
    if s_plus.dim() != s.dim() {
        return Err(invalid(format!(
            "pencil dimensions differ: {} vs {}",
            s_plus.dim(),
            s.dim()
        )));
    }
    if !s_plus.as_mat().is_finite() {
        return Err(invalid("S⁺ has non-finite entries"));
    }
    let whitening = Whitening::from_matrix(s, rank, eps_rel)?;
    let projected = whitening.project(s_plus)?;
    whitening.solve(&projected, count)
}

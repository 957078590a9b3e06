use crate::error::{invalid, Error, Result};
use crate::estimators::covariance::check_pair;
use crate::estimators::routes::{covariance_top, cross_covariance_top, pencil_top};
use crate::estimators::{ConstraintTag, Diagnostics, Method, SubspaceEstimate};
use crate::linalg::{
    generalized_eig_top, sym_eig_top, EigenDecomposition, GeneralizedEigenResult, Mat,
    SymmetricMatrix,
};
use crate::scalar::Real;

pub(crate) fn check_k(k: usize, d: usize) -> Result<()> {
    if k == 0 || k > d {
        return Err(invalid(format!("k = {k} outside 1..={d}")));
    }
    Ok(())
}

pub(crate) fn check_truncation(k: usize, s: usize, d: usize) -> Result<()> {
    check_k(k, d)?;
    if s < k {
        return Err(Error::InvalidTruncation { s, k });
    }
    if s > d {
        return Err(invalid(format!(
            "truncation rank {s} exceeds dimension {d}"
        )));
    }
    Ok(())
}

pub(crate) fn orthonormal_estimate<T: Real>(
    method: Method,
    eig: EigenDecomposition<T>,
) -> SubspaceEstimate<T> {
    SubspaceEstimate {
        basis: eig.vectors,
        constraint: ConstraintTag::Orthonormal,
        method,
        diagnostics: Diagnostics {
            values: eig.values,
            ..Diagnostics::default()
        },
    }
}

pub(crate) fn generalized_estimate<T: Real>(
    method: Method,
    res: GeneralizedEigenResult<T>,
    k: usize,
) -> Result<SubspaceEstimate<T>> {
    if res.values.len() < k {
        return Err(Error::DegenerateCovariance(format!(
            "only {} directions survive truncation, {k} requested",
            res.values.len()
        )));
    }
    let keep: Vec<usize> = (0..k).collect();
    Ok(SubspaceEstimate {
        basis: res.vectors.select_columns(&keep),
        constraint: ConstraintTag::SOrthonormal,
        method,
        diagnostics: Diagnostics {
            values: res.values[..k].to_vec(),
            eps_used: Some(res.eps_used),
            truncation_rank: Some(res.truncation_rank),
            retained_rank: Some(res.retained_rank),
        },
    })
}

/// Standard PCA: the top-`k` eigenvectors of a covariance matrix.
pub fn pca<T: Real>(s: &SymmetricMatrix<T>, k: usize) -> Result<SubspaceEstimate<T>> {
    check_k(k, s.dim())?;
    Ok(orthonormal_estimate(Method::Pca, sym_eig_top(s, k)?))
}

/// PCA on `XᵀX / n` without forming it when `n < d`.
pub fn pca_from_data<T: Real>(x: &Mat<T>, k: usize) -> Result<SubspaceEstimate<T>> {
    check_k(k, x.cols())?;
    Ok(orthonormal_estimate(Method::Pca, covariance_top(x, k)?))
}

/// PCA+: top-`k` eigenvectors of the contrastive covariance, ranked by
/// signed eigenvalue.
pub fn pca_plus<T: Real>(x: &Mat<T>, x_plus: &Mat<T>, k: usize) -> Result<SubspaceEstimate<T>> {
    check_pair(x, x_plus)?;
    check_k(k, x.cols())?;
    Ok(orthonormal_estimate(
        Method::PcaPlus,
        cross_covariance_top(x, x_plus, k)?,
    ))
}

/// PCA++: generalized eigenvectors of `(S⁺ₙ, (Sₙ)ₛ)` for the `k` largest
/// generalized eigenvalues, normalized so that `Vᵀ (Sₙ)ₛ V = I`.
pub fn pca_plus_plus<T: Real>(
    x: &Mat<T>,
    x_plus: &Mat<T>,
    k: usize,
    s: usize,
    eps_rel: T,
) -> Result<SubspaceEstimate<T>> {
    check_pair(x, x_plus)?;
    check_truncation(k, s, x.cols())?;
    generalized_estimate(
        Method::PcaPlusPlus,
        pencil_top(x, x, x_plus, s, eps_rel, k)?,
        k,
    )
}

/// PCA++ on already formed covariance matrices.
pub fn pca_plus_plus_matrices<T: Real>(
    s_plus: &SymmetricMatrix<T>,
    s_cov: &SymmetricMatrix<T>,
    k: usize,
    s: usize,
    eps_rel: T,
) -> Result<SubspaceEstimate<T>> {
    check_truncation(k, s, s_cov.dim())?;
    generalized_estimate(
        Method::PcaPlusPlus,
        generalized_eig_top(s_plus, s_cov, s, eps_rel, Some(k))?,
        k,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{contrastive_cov, sample_cov};
    use crate::linalg::truncate_rank;

    #[test]
    fn pca_picks_the_largest_axis() {
        let est = pca(&SymmetricMatrix::from_diag(&[5.0, 2.0, 1.0]), 1).unwrap();
        assert_eq!(est.basis.column(0), vec![1.0, 0.0, 0.0]);
        let est = pca(&SymmetricMatrix::from_diag(&[11.0, 501.0, 1.0, 1.0]), 1).unwrap();
        assert_eq!(est.basis.column(0), vec![0.0, 1.0, 0.0, 0.0]);
        assert!(pca(&SymmetricMatrix::<f64>::identity(2), 3).is_err());
    }

    #[test]
    fn truncation_rank_below_k_is_rejected() {
        let x = Mat::<f64>::identity(4);
        assert_eq!(
            pca_plus_plus(&x, &x, 3, 2, 1e-10).unwrap_err(),
            Error::InvalidTruncation { s: 2, k: 3 }
        );
    }

    #[test]
    fn data_and_matrix_paths_agree() {
        let x = Mat::from_fn(30, 8, |i, j| {
            (((i * 7 + j * 3) % 11) as f64 - 5.0) * (1.0 + j as f64 * 0.1)
        });
        let xp = Mat::from_fn(30, 8, |i, j| {
            x[(i, j)] * 0.6 + ((i * 5 + j) % 7) as f64 - 3.0
        });
        let a = pca_plus_plus(&x, &xp, 2, 5, 1e-10).unwrap();
        let b = pca_plus_plus_matrices(
            &contrastive_cov(&x, &xp).unwrap(),
            &sample_cov(&x).unwrap(),
            2,
            5,
            1e-10,
        )
        .unwrap();
        assert!(a.basis.sub(&b.basis).max_abs() < 1e-8);
        // Vᵀ (S)ₛ V = I
        let st = truncate_rank(&sample_cov(&x).unwrap(), 5).unwrap();
        let g = a.basis.t_matmul(&st.as_mat().matmul(&a.basis));
        assert!(g.sub(&Mat::identity(2)).max_abs() < 1e-8);
    }
}

use crate::error::{invalid, Error, Result};
use crate::estimators::contrastive::{
    check_k, check_truncation, generalized_estimate, orthonormal_estimate,
};
use crate::estimators::covariance::{check_pair, sample_cov};
use crate::estimators::routes::{pencil_top, thin_svd};
use crate::estimators::{ConstraintTag, Diagnostics, Method, SubspaceEstimate};
use crate::linalg::qr::orthonormalize;
use crate::linalg::{sym_eig_top, Mat, SymmetricMatrix};
use crate::scalar::Real;

/// cPCA: top-`k` eigenvectors of `Σ_f - α Σ_b`.
pub fn cpca<T: Real>(
    x_f: &Mat<T>,
    x_b: &Mat<T>,
    alpha: T,
    k: usize,
) -> Result<SubspaceEstimate<T>> {
    check_pair(x_f, x_b)?;
    check_k(k, x_f.cols())?;
    if !alpha.is_finite() {
        return Err(invalid("contrast strength must be finite"));
    }
    let diff = sample_cov(x_f)?
        .as_mat()
        .lin_comb(T::one(), sample_cov(x_b)?.as_mat(), -alpha);
    let eig = sym_eig_top(&SymmetricMatrix::new(diff)?, k)?;
    Ok(orthonormal_estimate(Method::Cpca, eig))
}

/// cPCA++: the generalized problem `(Σ_f, (Σ_b)ₛ)`, top `k` pairs.
pub fn cpca_pp<T: Real>(
    x_f: &Mat<T>,
    x_b: &Mat<T>,
    k: usize,
    s: usize,
    eps_rel: T,
) -> Result<SubspaceEstimate<T>> {
    check_pair(x_f, x_b)?;
    check_truncation(k, s, x_f.cols())?;
    generalized_estimate(
        Method::CpcaPlusPlus,
        pencil_top(x_b, x_f, x_f, s, eps_rel, k)?,
        k,
    )
}

/// Two-view CCA; returns the top-`k` X-side canonical directions.
///
/// Each view is whitened with `(S + εI)^{-1/2}`, `ε = eps_rel · λ₁(S)`, and
/// the basis is the leading left singular vectors of the whitened
/// cross-covariance. These are not pushed back through the whitening: the
/// canonical weights `(S + εI)^{-1/2} b` inflate sampling error along
/// low-variance coordinates, so their span says little about the shared
/// subspace even when the correlations are estimated well.
///
/// With thin factorizations `X = Uₓ Σₓ Vₓᵀ` the whitened cross-covariance is
/// `Vₓ (Dₓ UₓᵀU_y D_y) V_yᵀ` with `D = sqrt(λ / (λ + ε))`, so only the small
/// middle factor is decomposed. Diagnostics hold the canonical correlations.
pub fn cca_top_k<T: Real>(
    x: &Mat<T>,
    x_plus: &Mat<T>,
    k: usize,
    eps_rel: T,
) -> Result<SubspaceEstimate<T>> {
    check_pair(x, x_plus)?;
    check_k(k, x.cols())?;
    if !(eps_rel >= T::zero()) || !eps_rel.is_finite() {
        return Err(invalid("eps_rel must be a finite nonnegative number"));
    }
    let nf = T::of(x.rows() as f64);
    let sx = thin_svd(x)?;
    let sy = thin_svd(x_plus)?;
    let shrink = |sigma: &[T]| -> Result<Vec<T>> {
        let lambda: Vec<T> = sigma.iter().map(|&s| s * s / nf).collect();
        let top = lambda.first().copied().unwrap_or(T::zero());
        if !(top > T::zero()) {
            return Err(Error::DegenerateCovariance("a view has no variance".into()));
        }
        let eps = eps_rel * top;
        Ok(lambda
            .iter()
            .map(|&l| (l / (l + eps)).sqrt())
            .collect::<Vec<T>>())
    };
    let dx = shrink(&sx.sigma)?;
    let dy = shrink(&sy.sigma)?;
    if sx.sigma.len() < k {
        return Err(Error::DegenerateCovariance(format!(
            "X has rank {} below k = {k}",
            sx.sigma.len()
        )));
    }
    let mut left = sx.u.clone();
    left.scale_columns(&dx);
    let mut right = sy.u.clone();
    right.scale_columns(&dy);
    let b = left.t_matmul(&right);
    // left singular vectors of B from B Bᵀ
    let eig = sym_eig_top(&SymmetricMatrix::new(b.matmul_t(&b))?, k)?;
    let basis = orthonormalize(&sx.v.matmul(&eig.vectors));
    let correlations = eig
        .values
        .iter()
        .map(|&v| v.max(T::zero()).sqrt())
        .collect();
    Ok(SubspaceEstimate {
        basis,
        constraint: ConstraintTag::Orthonormal,
        method: Method::Cca,
        diagnostics: Diagnostics {
            values: correlations,
            ..Diagnostics::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{pca, pca_plus, synthesize_fg_bg};

    fn sample(n: usize, d: usize, seed: u64) -> Mat<f64> {
        let mut state = seed;
        Mat::from_fn(n, d, |_, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
    }

    fn proj_gap(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
        a.matmul_t(a).sub(&b.matmul_t(b)).max_abs()
    }

    #[test]
    fn cpca_with_unit_contrast_is_pca_plus() {
        let x = sample(40, 6, 1);
        let xp = sample(40, 6, 2).add(&x.scale(0.8));
        let (f, b) = synthesize_fg_bg(&x, &xp).unwrap();
        let c = cpca(&f, &b, 1.0, 2).unwrap();
        let p = pca_plus(&x, &xp, 2).unwrap();
        assert!(proj_gap(&c.basis, &p.basis) < 1e-10);
        let c0 = cpca(&f, &b, 0.0, 2).unwrap();
        let p0 = pca(&sample_cov(&f).unwrap(), 2).unwrap();
        assert!(proj_gap(&c0.basis, &p0.basis) < 1e-10);
    }

    #[test]
    fn identical_views_are_perfectly_correlated() {
        let x = sample(30, 5, 3);
        let est = cca_top_k(&x, &x, 3, 1e-12).unwrap();
        for c in &est.diagnostics.values {
            assert!((c - 1.0).abs() < 1e-9, "correlation {c}");
        }
        assert!((est.basis.t_matmul(&est.basis).sub(&Mat::identity(3))).max_abs() < 1e-12);
    }

    #[test]
    fn cca_rejects_empty_view() {
        let x = sample(10, 3, 4);
        let z = Mat::zeros(10, 3);
        assert!(matches!(
            cca_top_k(&x, &z, 1, 1e-10),
            Err(Error::DegenerateCovariance(_))
        ));
    }
}

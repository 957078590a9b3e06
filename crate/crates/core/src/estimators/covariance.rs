use crate::error::{invalid, Result};
use crate::linalg::{Mat, SymmetricMatrix};
use crate::scalar::Real;

/// `Sₙ = XᵀX / n` (no centering; the model is zero-mean).
pub fn sample_cov<T: Real>(x: &Mat<T>) -> Result<SymmetricMatrix<T>> {
    let n = x.rows();
    if n == 0 || x.cols() == 0 {
        return Err(invalid("sample covariance of an empty matrix"));
    }
    SymmetricMatrix::new(Mat::product(x, true, x, false, T::of(n as f64).recip()))
}

/// `S⁺ₙ = (XᵀX⁺ + X⁺ᵀX) / (2n)`; symmetric but possibly indefinite.
pub fn contrastive_cov<T: Real>(x: &Mat<T>, x_plus: &Mat<T>) -> Result<SymmetricMatrix<T>> {
    check_pair(x, x_plus)?;
    let n = x.rows();
    // symmetrizing C = XᵀX⁺/n gives exactly (C + Cᵀ)/2
    SymmetricMatrix::new(Mat::product(
        x,
        true,
        x_plus,
        false,
        T::of(n as f64).recip(),
    ))
}

pub(crate) fn check_pair<T: Real>(x: &Mat<T>, x_plus: &Mat<T>) -> Result<()> {
    if x.shape() != x_plus.shape() {
        return Err(invalid(format!(
            "paired matrices differ in shape: {:?} vs {:?}",
            x.shape(),
            x_plus.shape()
        )));
    }
    if x.rows() == 0 || x.cols() == 0 {
        return Err(invalid("paired matrices are empty"));
    }
    Ok(())
}

/// Sample and contrastive covariance of one paired dataset.
#[derive(Clone, Debug)]
pub struct CovariancePair<T> {
    pub s: SymmetricMatrix<T>,
    pub s_plus: SymmetricMatrix<T>,
}

impl<T: Real> CovariancePair<T> {
    pub fn from_data(x: &Mat<T>, x_plus: &Mat<T>) -> Result<Self> {
        Ok(Self {
            s: sample_cov(x)?,
            s_plus: contrastive_cov(x, x_plus)?,
        })
    }
}

/// Synthetic foreground `(X + X⁺)/2` and background `(X - X⁺)/2`.
pub fn synthesize_fg_bg<T: Real>(x: &Mat<T>, x_plus: &Mat<T>) -> Result<(Mat<T>, Mat<T>)> {
    check_pair(x, x_plus)?;
    let half = T::of(0.5);
    Ok((
        x.lin_comb(half, x_plus, half),
        x.lin_comb(half, x_plus, -half),
    ))
}

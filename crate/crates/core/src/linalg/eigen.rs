use crate::error::{invalid, Result};
use crate::linalg::krylov;
use crate::linalg::matrix::Mat;
use crate::linalg::tridiagonal::{tridiagonal_top, tridiagonalize};
use crate::scalar::Real;

/// Square matrix that is symmetric by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix<T> {
    inner: Mat<T>,
}

impl<T: Real> SymmetricMatrix<T> {
    /// Symmetrizes `(M + Mᵀ) / 2`; fails only on non-square input.
    pub fn new(m: Mat<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(invalid(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let mut m = m;
        let n = m.rows();
        let half = T::of(0.5);
        for i in 0..n {
            for j in 0..i {
                let avg = half * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = avg;
                m[(j, i)] = avg;
            }
        }
        Ok(Self { inner: m })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: Mat::identity(n),
        }
    }

    pub fn from_diag(diag: &[T]) -> Self {
        Self {
            inner: Mat::from_diag(diag),
        }
    }

    /// `V diag(values) Vᵀ` for a `d x r` factor `V`.
    pub fn from_factor(vectors: &Mat<T>, values: &[T]) -> Self {
        assert_eq!(vectors.cols(), values.len());
        let mut scaled = vectors.clone();
        scaled.scale_columns(values);
        let m = scaled.matmul_t(vectors);
        Self::new(m).expect("outer product is square")
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn as_mat(&self) -> &Mat<T> {
        &self.inner
    }

    pub fn into_mat(self) -> Mat<T> {
        self.inner
    }

    pub fn scale(&self, alpha: T) -> Self {
        Self {
            inner: self.inner.scale(alpha),
        }
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> T {
        self.inner[(i, j)]
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> Result<T> {
        let eig = sym_eig_values(self)?;
        Ok(eig.iter().fold(T::zero(), |m, v| m.max(v.abs())))
    }
}

/// Eigenpairs of a symmetric matrix: `values` in descending order and the
/// matching orthonormal eigenvectors as the columns of `vectors`.
///
/// A full decomposition has `d` columns; [`sym_eig_top`] returns the leading
/// `r` only.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    pub values: Vec<T>,
    pub vectors: Mat<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `V diag(λ) Vᵀ` over the stored pairs.
    pub fn reconstruct(&self) -> SymmetricMatrix<T> {
        SymmetricMatrix::from_factor(&self.vectors, &self.values)
    }
}

/// Full eigendecomposition of a symmetric matrix.
pub fn sym_eig<T: Real>(m: &SymmetricMatrix<T>) -> Result<EigenDecomposition<T>> {
    sym_eig_top(m, m.dim())
}

/// Leading `count` eigenpairs (largest signed eigenvalues first).
pub fn sym_eig_top<T: Real>(m: &SymmetricMatrix<T>, count: usize) -> Result<EigenDecomposition<T>> {
    let n = m.dim();
    if count > n {
        return Err(invalid(format!(
            "requested {count} eigenpairs of a {n}x{n} matrix"
        )));
    }
    if !m.as_mat().is_finite() {
        return Err(invalid("matrix has non-finite entries"));
    }
    if n == 0 || count == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            vectors: Mat::zeros(n, 0),
        });
    }
    if krylov::worthwhile(n, count) {
        if let Some(eig) = krylov::krylov_top(n, count, |v| m.as_mat().matmul(v)) {
            return Ok(eig);
        }
    }
    dense_top(m, count)
}

/// Householder tridiagonalization followed by the tridiagonal solver.
pub(crate) fn dense_top<T: Real>(
    m: &SymmetricMatrix<T>,
    count: usize,
) -> Result<EigenDecomposition<T>> {
    let reduction = tridiagonalize(m.as_mat().clone());
    let (values, mut vectors) = tridiagonal_top(&reduction.tri, count)?;
    reduction.back_transform(&mut vectors);
    normalize_signs(&mut vectors);
    Ok(EigenDecomposition { values, vectors })
}

/// All eigenvalues, descending, without vectors.
pub fn sym_eig_values<T: Real>(m: &SymmetricMatrix<T>) -> Result<Vec<T>> {
    if !m.as_mat().is_finite() {
        return Err(invalid("matrix has non-finite entries"));
    }
    let reduction = tridiagonalize(m.as_mat().clone());
    let mut vals = crate::linalg::tridiagonal::ql_implicit(&reduction.tri, None)?;
    vals.reverse();
    Ok(vals)
}

/// Best rank-`s` approximation `Σ_{j≤s} λ_j v_j v_jᵀ` over the top-`s`
/// eigenpairs (by signed eigenvalue).
pub fn truncate_rank<T: Real>(m: &SymmetricMatrix<T>, s: usize) -> Result<SymmetricMatrix<T>> {
    let n = m.dim();
    if s == 0 || s > n {
        return Err(invalid(format!("truncation rank {s} outside 1..={n}")));
    }
    let eig = sym_eig_top(m, s)?;
    Ok(eig.reconstruct())
}

/// Flips each column so that its largest-magnitude entry is positive.
pub fn normalize_signs<T: Real>(vectors: &mut Mat<T>) {
    let (rows, cols) = vectors.shape();
    for j in 0..cols {
        let mut best = T::zero();
        let mut sign_negative = false;
        for i in 0..rows {
            let v = vectors[(i, j)];
            if v.abs() > best {
                best = v.abs();
                sign_negative = v < T::zero();
            }
        }
        if sign_negative {
            for i in 0..rows {
                vectors[(i, j)] = -vectors[(i, j)];
            }
        }
    }
}

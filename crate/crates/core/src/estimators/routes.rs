//! Spectral computations on covariance-type matrices given by their data
//! factors. Whenever the sample count is below the dimension the work is
//! moved to `n x n` Gram matrices. Otherwise a few pairs are found by a
//! Krylov solver applying the data factors directly, and failing that the
//! dense `d x d` matrices are formed. Every route falls back to the dense
//! computation.

use crate::error::{Error, Result};
use crate::estimators::covariance::{contrastive_cov, sample_cov};
use crate::linalg::eigen::dense_top;
use crate::linalg::krylov;
use crate::linalg::{
    normalize_signs, sym_eig, sym_eig_top, EigenDecomposition, GeneralizedEigenResult, Mat,
    SymmetricMatrix, Whitening,
};
use crate::scalar::Real;

/// Relative size below which a Gram eigenvalue is treated as numerically zero.
fn null_tolerance<T: Real>(size: usize) -> T {
    T::epsilon() * T::of(size.max(1) as f64) * T::of(10.0)
}

/// Eigendecomposition of a symmetric matrix, switching to the partial solver
/// when only a few pairs are needed.
fn leading<T: Real>(m: &SymmetricMatrix<T>, count: usize) -> Result<EigenDecomposition<T>> {
    if count >= m.dim() {
        sym_eig(m)
    } else {
        sym_eig_top(m, count)
    }
}

/// Thin spectral factorization `Y = U diag(σ) Vᵀ` restricted to singular
/// values above roundoff, computed from the smaller Gram matrix.
#[derive(Clone, Debug)]
pub struct ThinSvd<T> {
    pub u: Mat<T>,
    pub sigma: Vec<T>,
    pub v: Mat<T>,
}

pub fn thin_svd<T: Real>(y: &Mat<T>) -> Result<ThinSvd<T>> {
    let (n, d) = y.shape();
    let wide = d > n;
    let gram = if wide { y.matmul_t(y) } else { y.t_matmul(y) };
    let eig = sym_eig(&SymmetricMatrix::new(gram)?)?;
    let top = eig.values.first().copied().unwrap_or(T::zero());
    let tol = null_tolerance::<T>(n.max(d)) * top;
    let keep: Vec<usize> = (0..eig.len())
        .filter(|&j| top > T::zero() && eig.values[j] > tol)
        .collect();
    let sigma: Vec<T> = keep.iter().map(|&j| eig.values[j].sqrt()).collect();
    let basis = eig.vectors.select_columns(&keep);
    let inv: Vec<T> = sigma.iter().map(|s| s.recip()).collect();
    // the other factor is Y (or Yᵀ) times the basis, rescaled
    let (u, v) = if wide {
        let mut v = y.t_matmul(&basis);
        v.scale_columns(&inv);
        (basis, v)
    } else {
        let mut u = y.matmul(&basis);
        u.scale_columns(&inv);
        (u, basis)
    };
    Ok(ThinSvd { u, sigma, v })
}

/// Leading `count` eigenpairs of the sample covariance `YᵀY / n`.
pub fn covariance_top<T: Real>(y: &Mat<T>, count: usize) -> Result<EigenDecomposition<T>> {
    let (n, d) = y.shape();
    if count > d {
        return Err(Error::InvalidInput(format!(
            "requested {count} eigenpairs in dimension {d}"
        )));
    }
    if d > n && count <= n {
        if let Some(eig) = covariance_top_gram(y, count)? {
            return Ok(eig);
        }
    }
    if krylov::worthwhile(d, count) {
        let nf = T::of(n as f64).recip();
        if let Some(eig) = krylov::krylov_top(d, count, |v| y.t_matmul(&y.matmul(v)).scale(nf)) {
            return Ok(eig);
        }
        return dense_top(&sample_cov(y)?, count);
    }
    leading(&sample_cov(y)?, count)
}

/// Gram route: eigenpairs of `YYᵀ/n` mapped through `v = Yᵀu / sqrt(nλ)`.
/// Returns `None` when a requested eigenvalue is numerically zero, since its
/// eigenvector cannot be recovered from the Gram side.
fn covariance_top_gram<T: Real>(y: &Mat<T>, count: usize) -> Result<Option<EigenDecomposition<T>>> {
    let n = y.rows();
    let nf = T::of(n as f64);
    let gram = SymmetricMatrix::new(y.matmul_t(y).scale(nf.recip()))?;
    let eig = leading(&gram, count)?;
    let top = eig.values.first().copied().unwrap_or(T::zero());
    let tol = null_tolerance::<T>(y.cols()) * top;
    if !(top > T::zero()) || eig.values.iter().any(|&v| v <= tol) {
        return Ok(None);
    }
    let mut vectors = y.t_matmul(&eig.vectors);
    let scale: Vec<T> = eig
        .values
        .iter()
        .map(|&l| (nf * l).sqrt().recip())
        .collect();
    vectors.scale_columns(&scale);
    normalize_signs(&mut vectors);
    Ok(Some(EigenDecomposition {
        values: eig.values,
        vectors,
    }))
}

/// Leading `count` eigenpairs (by signed value) of `(PᵀQ + QᵀP) / (2n)`.
pub fn cross_covariance_top<T: Real>(
    p: &Mat<T>,
    q: &Mat<T>,
    count: usize,
) -> Result<EigenDecomposition<T>> {
    let (n, d) = p.shape();
    if q.shape() != (n, d) {
        return Err(Error::InvalidInput(format!(
            "paired matrices differ in shape: {:?} vs {:?}",
            p.shape(),
            q.shape()
        )));
    }
    if count > d {
        return Err(Error::InvalidInput(format!(
            "requested {count} eigenpairs in dimension {d}"
        )));
    }
    if d > 2 * n {
        if let Some(eig) = cross_covariance_top_rowspace(p, q, count)? {
            return Ok(eig);
        }
    }
    if krylov::worthwhile(d, count) {
        let half_n = T::of(2.0 * n as f64).recip();
        let apply = |v: &Mat<T>| {
            p.t_matmul(&q.matmul(v))
                .add(&q.t_matmul(&p.matmul(v)))
                .scale(half_n)
        };
        if let Some(eig) = krylov::krylov_top(d, count, apply) {
            return Ok(eig);
        }
        return dense_top(&contrastive_cov(p, q)?, count);
    }
    leading(&contrastive_cov(p, q)?, count)
}

/// Compresses onto the row space of `Z = [P; Q]`: with `ZZᵀ = U Σ² Uᵀ` the
/// orthonormal basis is `Zᵀ U Σ⁻¹` and `P` in that basis is the top half of
/// `U Σ`. Outside the row space the matrix vanishes, so this is exact unless
/// a zero eigenvalue would rank among the requested ones.
fn cross_covariance_top_rowspace<T: Real>(
    p: &Mat<T>,
    q: &Mat<T>,
    count: usize,
) -> Result<Option<EigenDecomposition<T>>> {
    let (n, d) = p.shape();
    let mut z = Mat::zeros(2 * n, d);
    z.as_mut_slice()[..n * d].copy_from_slice(p.as_slice());
    z.as_mut_slice()[n * d..].copy_from_slice(q.as_slice());
    let gram = SymmetricMatrix::new(z.matmul_t(&z))?;
    let eig = sym_eig(&gram)?;
    let top = eig.values.first().copied().unwrap_or(T::zero());
    if !(top > T::zero()) {
        return Ok(None);
    }
    let tol = null_tolerance::<T>(d) * top;
    let keep: Vec<usize> = (0..eig.len()).filter(|&j| eig.values[j] > tol).collect();
    let r = keep.len();
    if r < count {
        return Ok(None);
    }
    let sigma: Vec<T> = keep.iter().map(|&j| eig.values[j].sqrt()).collect();
    let mut us = eig.vectors.select_columns(&keep);
    us.scale_columns(&sigma);
    let pc = Mat::from_fn(n, r, |i, j| us[(i, j)]);
    let qc = Mat::from_fn(n, r, |i, j| us[(n + i, j)]);
    let small = contrastive_cov(&pc, &qc)?;
    let small_eig = leading(&small, count)?;
    if count > 0 && small_eig.values[count - 1] < T::zero() {
        return Ok(None);
    }
    let mut basis = z.t_matmul(&eig.vectors.select_columns(&keep));
    let inv: Vec<T> = sigma.iter().map(|s| s.recip()).collect();
    basis.scale_columns(&inv);
    let mut vectors = basis.matmul(&small_eig.vectors);
    normalize_signs(&mut vectors);
    Ok(Some(EigenDecomposition {
        values: small_eig.values,
        vectors,
    }))
}

/// Generalized eigenpairs of the pencil `((PᵀQ + QᵀP)/(2n), (YᵀY/n)ₛ)`
/// computed from the data, keeping the leading `count` pairs.
///
/// Matches `generalized_eig_top` on the formed matrices. The whitened
/// contrastive matrix is assembled as `((PR)ᵀ(QR) + (QR)ᵀ(PR)) / (2n)`, so no
/// `d x d` matrix is needed when the top-`s` spectrum comes from the Gram side.
pub fn pencil_top<T: Real>(
    y: &Mat<T>,
    p: &Mat<T>,
    q: &Mat<T>,
    rank: usize,
    eps_rel: T,
    count: usize,
) -> Result<GeneralizedEigenResult<T>> {
    let (n, d) = y.shape();
    if p.shape() != q.shape() || p.cols() != d {
        return Err(Error::InvalidInput(
            "pencil data matrices disagree in shape".into(),
        ));
    }
    if rank == 0 || rank > d {
        return Err(Error::InvalidInput(format!(
            "truncation rank {rank} outside 1..={d}"
        )));
    }
    if rank == d && d > n && eps_rel > T::zero() {
        return pencil_full_rank_deficient(y, p, q, eps_rel, count);
    }
    let top = covariance_top(y, rank)?;
    let whitening = Whitening::from_eigenpairs(&top.values, &top.vectors, eps_rel)?;
    let r = whitening.transform();
    let pr = p.matmul(r);
    let qr = q.matmul(r);
    let projected = contrastive_cov(&pr, &qr)?;
    whitening.solve(&projected, Some(count))
}

/// Untruncated pencil with more dimensions than samples. Whitening with all
/// `d` eigenpairs of `S` equals the symmetric map `W = (S + εI)^{-1/2}` up to
/// an orthogonal change of basis, and `W` is `ε^{-1/2}` on the complement of
/// the row space, so everything is assembled from the Gram spectrum.
fn pencil_full_rank_deficient<T: Real>(
    y: &Mat<T>,
    p: &Mat<T>,
    q: &Mat<T>,
    eps_rel: T,
    count: usize,
) -> Result<GeneralizedEigenResult<T>> {
    let (n, d) = y.shape();
    let nf = T::of(n as f64);
    let svd = thin_svd(y)?;
    let lambda: Vec<T> = svd.sigma.iter().map(|&s| s * s / nf).collect();
    let lambda1 = lambda.first().copied().unwrap_or(T::zero());
    if !(lambda1 > T::zero()) {
        return Err(Error::DegenerateCovariance(
            "constraint covariance has no positive variance".into(),
        ));
    }
    let eps = eps_rel * lambda1;
    let outer = eps.sqrt().recip();
    // W = V (D - ε^{-1/2}) Vᵀ + ε^{-1/2} I
    let diff: Vec<T> = lambda
        .iter()
        .map(|&l| (l + eps).sqrt().recip() - outer)
        .collect();
    let v = &svd.v;
    let apply_right = |m: &Mat<T>| -> Mat<T> {
        let mut mv = m.matmul(v);
        mv.scale_columns(&diff);
        mv.matmul_t(v).add(&m.scale(outer))
    };
    let pw = apply_right(p);
    let qw = apply_right(q);
    let eig = cross_covariance_top(&pw, &qw, count.min(d))?;
    // W is symmetric, so W u is the same map applied to columns
    let mut vectors = apply_right(&eig.vectors.transpose()).transpose();
    normalize_signs(&mut vectors);
    Ok(GeneralizedEigenResult {
        values: eig.values,
        vectors,
        eps_used: eps,
        truncation_rank: d,
        retained_rank: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::generalized_eig_top;

    fn data(n: usize, d: usize, seed: u64) -> Mat<f64> {
        let mut state = seed;
        Mat::from_fn(n, d, |_, j| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let u = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            u * (1.0 + 3.0 / (1.0 + j as f64))
        })
    }

    fn same_span(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
        let pa = a.matmul_t(a);
        let pb = b.matmul_t(b);
        pa.sub(&pb).max_abs()
    }

    #[test]
    fn gram_route_matches_dense() {
        let y = data(12, 30, 1);
        let fast = covariance_top(&y, 5).unwrap();
        let dense = sym_eig_top(&sample_cov(&y).unwrap(), 5).unwrap();
        for (a, b) in fast.values.iter().zip(&dense.values) {
            assert!((a - b).abs() < 1e-12 * dense.values[0]);
        }
        assert!(same_span(&fast.vectors, &dense.vectors) < 1e-9);
    }

    #[test]
    fn rowspace_route_matches_dense() {
        let p = data(6, 40, 2);
        let q = data(6, 40, 3).add(&p.scale(0.5));
        let fast = cross_covariance_top(&p, &q, 3).unwrap();
        let dense = sym_eig_top(&contrastive_cov(&p, &q).unwrap(), 3).unwrap();
        for (a, b) in fast.values.iter().zip(&dense.values) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(same_span(&fast.vectors, &dense.vectors) < 1e-9);
    }

    #[test]
    fn truncated_pencil_matches_dense_solver() {
        let x = data(15, 40, 4);
        let xp = data(15, 40, 5).add(&x.scale(0.7));
        let fast = pencil_top(&x, &x, &xp, 6, 1e-10, 3).unwrap();
        let s = sample_cov(&x).unwrap();
        let sp = contrastive_cov(&x, &xp).unwrap();
        let dense = generalized_eig_top(&sp, &s, 6, 1e-10, Some(3)).unwrap();
        for (a, b) in fast.values.iter().zip(&dense.values) {
            assert!((a - b).abs() < 1e-8 * b.abs().max(1.0), "{a} vs {b}");
        }
        assert!(fast.vectors.sub(&dense.vectors).max_abs() < 1e-7);
    }

    #[test]
    fn untruncated_rank_deficient_pencil_matches_dense_solver() {
        let x = data(10, 16, 6);
        let xp = data(10, 16, 7).add(&x.scale(0.7));
        let eps_rel = 1e-3;
        let fast = pencil_top(&x, &x, &xp, 16, eps_rel, 2).unwrap();
        let s = sample_cov(&x).unwrap();
        let sp = contrastive_cov(&x, &xp).unwrap();
        let dense = generalized_eig_top(&sp, &s, 16, eps_rel, Some(2)).unwrap();
        for (a, b) in fast.values.iter().zip(&dense.values) {
            assert!((a - b).abs() < 1e-6 * b.abs(), "{a} vs {b}");
        }
        assert!(fast.vectors.sub(&dense.vectors).max_abs() < 1e-6 * dense.vectors.max_abs());
        assert!((fast.eps_used - dense.eps_used).abs() < 1e-12 * dense.eps_used);
    }

    #[test]
    fn thin_svd_reconstructs_both_orientations() {
        for (n, d) in [(9, 4), (4, 9)] {
            let y = data(n, d, 8);
            let svd = thin_svd(&y).unwrap();
            let mut us = svd.u.clone();
            us.scale_columns(&svd.sigma);
            assert!(us.matmul_t(&svd.v).sub(&y).max_abs() < 1e-12);
        }
    }
}

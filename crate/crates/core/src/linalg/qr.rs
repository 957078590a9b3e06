use crate::linalg::matrix::Mat;
use crate::scalar::{dot, norm2, Real};

/// Thin Householder QR of a tall matrix (`rows >= cols`).
///
/// Returns `(Q, diag(R))` with `Q` of shape `rows x cols`, orthonormal
/// columns, and the signs chosen so that `diag(R) >= 0`.
pub fn thin_qr<T: Real>(a: &Mat<T>) -> (Mat<T>, Vec<T>) {
    let (m, n) = a.shape();
    assert!(m >= n, "thin QR needs rows >= cols, got {m}x{n}");
    // work column-major so each reflector touches a contiguous slice
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut vs: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut taus = Vec::with_capacity(n);
    let mut rdiag = Vec::with_capacity(n);
    for j in 0..n {
        let x = &cols[j][j..];
        let alpha = x[0];
        let xnorm = norm2(&x[1..]);
        let mut v = x.to_vec();
        if xnorm == T::zero() {
            v.iter_mut().for_each(|t| *t = T::zero());
            v[0] = T::one();
            vs.push(v);
            taus.push(T::zero());
            rdiag.push(alpha);
            continue;
        }
        let mut beta = alpha.hypot(xnorm);
        if alpha >= T::zero() {
            beta = -beta;
        }
        let tau = (beta - alpha) / beta;
        let scale = (alpha - beta).recip();
        v[0] = T::one();
        v[1..].iter_mut().for_each(|t| *t = *t * scale);
        for col in cols.iter_mut().skip(j + 1) {
            let tail = &mut col[j..];
            let c = tau * dot(&v, tail);
            for (t, &vi) in tail.iter_mut().zip(&v) {
                *t = *t - c * vi;
            }
        }
        vs.push(v);
        taus.push(tau);
        rdiag.push(beta);
    }
    // accumulate Q = H_0 ... H_{n-1} [I; 0] column by column
    let mut q_cols: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut e = vec![T::zero(); m];
            e[j] = T::one();
            e
        })
        .collect();
    for q in q_cols.iter_mut() {
        for j in (0..n).rev() {
            let tail = &mut q[j..];
            let c = taus[j] * dot(&vs[j], tail);
            for (t, &vi) in tail.iter_mut().zip(&vs[j]) {
                *t = *t - c * vi;
            }
        }
    }
    for (j, q) in q_cols.iter_mut().enumerate() {
        if rdiag[j] < T::zero() {
            q.iter_mut().for_each(|t| *t = -*t);
            rdiag[j] = -rdiag[j];
        }
    }
    (Mat::from_columns(m, &q_cols), rdiag)
}

/// Orthonormal basis for the column span (same column count); assumes full
/// column rank.
pub fn orthonormalize<T: Real>(a: &Mat<T>) -> Mat<T> {
    thin_qr(a).0
}

/// `max |UᵀU - I|`, the deviation from orthonormal columns.
pub fn orthonormality_defect<T: Real>(u: &Mat<T>) -> T {
    let g = u.t_matmul(u);
    g.sub(&Mat::identity(u.cols())).max_abs()
}

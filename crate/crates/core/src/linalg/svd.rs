//! Singular values of narrow matrices by one-sided Jacobi rotations, which
//! keep small singular values accurate relative to their own size.

use crate::linalg::Mat;
use crate::scalar::{dot, Real};

const MAX_SWEEPS: usize = 60;

/// Singular values of `a` (any shape), descending. Meant for matrices with
/// few columns; the cost is `O(rows · cols²)` per sweep.
pub fn singular_values<T: Real>(a: &Mat<T>) -> Vec<T> {
    let (rows, cols) = a.shape();
    if cols > rows {
        return singular_values(&a.transpose());
    }
    let mut c: Vec<Vec<T>> = (0..cols).map(|j| a.column(j)).collect();
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(&c[p], &c[p]);
                let beta = dot(&c[q], &c[q]);
                let gamma = dot(&c[p], &c[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = (T::one() + t * t).sqrt().recip();
                let sn = cs * t;
                let (left, right) = c.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xv, yv) = (*x, *y);
                    *x = cs * xv - sn * yv;
                    *y = sn * xv + cs * yv;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = c.iter().map(|col| dot(col, col).sqrt()).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_rank_one() {
        let a = Mat::<f64>::from_rows(&[[3.0, 0.0], [0.0, -4.0], [0.0, 0.0]]).unwrap();
        assert_eq!(singular_values(&a), vec![4.0, 3.0]);
        let b = Mat::<f64>::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        let sv = singular_values(&b);
        assert!((sv[0] - 5.0).abs() < 1e-14 && sv[1].abs() < 1e-15);
    }

    #[test]
    fn small_values_keep_relative_accuracy() {
        let a = Mat::<f64>::from_rows(&[[1.0, 0.0], [0.0, 1e-12]]).unwrap();
        let q = Mat::from_rows(&[[0.6, -0.8], [0.8, 0.6]]).unwrap();
        let sv = singular_values(&q.matmul(&a));
        assert!((sv[1] - 1e-12).abs() < 1e-26, "{}", sv[1]);
    }
}

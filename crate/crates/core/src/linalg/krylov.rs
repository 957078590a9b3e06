//! Block Krylov solver for a few leading eigenpairs of a symmetric operator
//! known only through its action on blocks of vectors.
//!
//! Every answer is checked through its residual `‖Av − θv‖`; when that check
//! fails within the basis budget the solver gives up and the caller falls
//! back to a dense decomposition.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::eigen::{normalize_signs, sym_eig, EigenDecomposition, SymmetricMatrix};
use crate::linalg::Mat;
use crate::scalar::Real;

/// Extra vectors per block beyond the requested count.
const OVERSAMPLE: usize = 8;
/// Basis budget in blocks.
const MAX_BLOCKS: usize = 16;

/// Columns of the Krylov basis the solver may build for `count` pairs.
pub(crate) fn basis_budget(dim: usize, count: usize) -> usize {
    ((count + OVERSAMPLE) * MAX_BLOCKS).min(dim)
}

/// Whether the iterative solver is worth trying: the basis budget has to be a
/// small fraction of the dimension.
pub(crate) fn worthwhile(dim: usize, count: usize) -> bool {
    dim >= 256 && 4 * basis_budget(dim, count) <= dim
}

fn hstack<T: Real>(blocks: &[Mat<T>]) -> Mat<T> {
    let rows = blocks.first().map_or(0, |b| b.rows());
    let cols: usize = blocks.iter().map(|b| b.cols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut offset = 0;
    for b in blocks {
        for i in 0..rows {
            out.row_mut(i)[offset..offset + b.cols()].copy_from_slice(b.row(i));
        }
        offset += b.cols();
    }
    out
}

fn gaussian_column<T: Real>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<T> {
    (0..dim)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            T::of(z)
        })
        .collect()
}

/// Orthonormalizes the columns of `w` against `basis` and each other, with
/// two projection passes. Columns that vanish are refilled at random.
fn extend_basis<T: Real>(basis: Option<&Mat<T>>, mut w: Mat<T>, rng: &mut ChaCha8Rng) -> Mat<T> {
    let (dim, cols) = w.shape();
    for _ in 0..2 {
        if let Some(q) = basis {
            let c = q.t_matmul(&w);
            w = w.sub(&q.matmul(&c));
        }
    }
    let mut out: Vec<Vec<T>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = w.column(j);
        let mut refills = 0;
        loop {
            let before = crate::scalar::norm2(&v);
            for _ in 0..2 {
                if let Some(q) = basis {
                    let c = q.t_matmul(&Mat::from_columns(dim, &[&v]));
                    let proj = q.matmul(&c);
                    v.iter_mut()
                        .zip(proj.as_slice())
                        .for_each(|(a, &b)| *a = *a - b);
                }
                for u in &out {
                    let dot = crate::scalar::dot(u, &v);
                    crate::scalar::axpy(-dot, u, &mut v);
                }
            }
            let after = crate::scalar::norm2(&v);
            if after > T::of(1e-8) * before && after > T::zero() {
                let inv = after.recip();
                v.iter_mut().for_each(|a| *a = *a * inv);
                break;
            }
            refills += 1;
            if refills > 4 {
                // the basis already spans the whole space
                return Mat::from_columns(dim, &out);
            }
            v = gaussian_column(rng, dim);
        }
        out.push(v);
    }
    Mat::from_columns(dim, &out)
}

/// Leading `count` eigenpairs (largest signed values) of the symmetric
/// operator `apply` on `R^dim`, or `None` when the residual check does not
/// pass within the basis budget.
pub(crate) fn krylov_top<T: Real>(
    dim: usize,
    count: usize,
    apply: impl Fn(&Mat<T>) -> Mat<T>,
) -> Option<EigenDecomposition<T>> {
    if count == 0 || count > dim {
        return None;
    }
    let block = (count + OVERSAMPLE).min(dim);
    let budget = basis_budget(dim, count);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b72_796c ^ ((dim as u64) << 20) ^ count as u64);
    let start: Vec<Vec<T>> = (0..block).map(|_| gaussian_column(&mut rng, dim)).collect();
    let mut next = extend_basis(None, Mat::from_columns(dim, &start), &mut rng);
    let mut q_blocks: Vec<Mat<T>> = Vec::new();
    let mut a_blocks: Vec<Mat<T>> = Vec::new();
    let tol = T::epsilon() * T::of(1e4);
    loop {
        let image = apply(&next);
        if image.shape() != next.shape() || !image.is_finite() {
            return None;
        }
        q_blocks.push(next);
        a_blocks.push(image);
        let q = hstack(&q_blocks);
        let aq = hstack(&a_blocks);
        let m = q.cols();
        if m >= count {
            let ritz = sym_eig(&SymmetricMatrix::new(q.t_matmul(&aq)).ok()?).ok()?;
            let scale = ritz
                .values
                .iter()
                .fold(T::zero(), |acc, v| acc.max(v.abs()));
            let keep: Vec<usize> = (0..count).collect();
            let y = ritz.vectors.select_columns(&keep);
            let mut vectors = q.matmul(&y);
            let mut residual = aq.matmul(&y);
            for i in 0..dim {
                let row = residual.row_mut(i);
                for (j, r) in row.iter_mut().enumerate() {
                    *r = *r - ritz.values[j] * vectors[(i, j)];
                }
            }
            let worst = (0..count)
                .map(|j| crate::scalar::norm2(&residual.column(j)))
                .fold(T::zero(), |acc, r| acc.max(r));
            if worst <= tol * scale || scale == T::zero() {
                normalize_signs(&mut vectors);
                return Some(EigenDecomposition {
                    values: ritz.values[..count].to_vec(),
                    vectors,
                });
            }
        }
        if m + block > budget || m >= dim {
            return None;
        }
        let last = a_blocks.last().expect("at least one block").clone();
        next = extend_basis(Some(&q), last, &mut rng);
        if next.cols() == 0 {
            return None;
        }
    }
}

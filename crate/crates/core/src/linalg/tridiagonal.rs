//! Householder reduction to tridiagonal form and the tridiagonal eigen
//! kernels built on it: implicit-shift QL for eigenvalues (optionally with
//! vectors) and inverse iteration for selected eigenvectors.

use crate::error::{Error, Result};
use crate::linalg::matrix::Mat;
use crate::scalar::{axpy, dot, norm2, Real};

/// Symmetric tridiagonal matrix: `diag[i]` on the diagonal and `off[i]`
/// coupling entries `i` and `i + 1`.
#[derive(Debug, Clone)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

/// Result of the Householder reduction `A = Q T Qᵀ`.
///
/// Reflector `j` acts on coordinates `j + 1..n` as `I - tau_j v_j v_jᵀ` with
/// `v_j[0] = 1`.
pub struct Reduction<T> {
    pub tri: Tridiagonal<T>,
    reflectors: Vec<Vec<T>>,
    taus: Vec<T>,
}

/// Reduces the symmetric matrix held in `a` (only its lower triangle is
/// read) to tridiagonal form.
pub fn tridiagonalize<T: Real>(mut a: Mat<T>) -> Reduction<T> {
    let n = a.rows();
    debug_assert!(a.is_square());
    let mut diag = vec![T::zero(); n];
    let mut off = vec![T::zero(); n.saturating_sub(1)];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let mut taus = Vec::with_capacity(n.saturating_sub(2));
    let half = T::of(0.5);

    let data = a.as_mut_slice();
    let mut v = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];

    for j in 0..n.saturating_sub(2) {
        let m = n - j - 1;
        let v = &mut v[..m];
        for (t, vt) in v.iter_mut().enumerate() {
            *vt = data[(j + 1 + t) * n + j];
        }
        diag[j] = data[j * n + j];
        let alpha = v[0];
        let xnorm = norm2(&v[1..]);
        if xnorm == T::zero() {
            off[j] = alpha;
            v[0] = T::one();
            v[1..].iter_mut().for_each(|x| *x = T::zero());
            reflectors.push(v.to_vec());
            taus.push(T::zero());
            continue;
        }
        let mut beta = alpha.hypot(xnorm);
        if alpha >= T::zero() {
            beta = -beta;
        }
        let tau = (beta - alpha) / beta;
        let scale = (alpha - beta).recip();
        v[0] = T::one();
        v[1..].iter_mut().for_each(|x| *x = *x * scale);
        off[j] = beta;

        // p = tau * A22 v from the lower triangle of the trailing block
        let p = &mut p[..m];
        p.iter_mut().for_each(|x| *x = T::zero());
        let base = (j + 1) * n + (j + 1);
        for i in 0..m {
            let row = &data[base + i * n..base + i * n + i + 1];
            let vi = v[i];
            let (strict, d) = row.split_at(i);
            let s = dot(strict, &v[..i]) + d[0] * vi;
            axpy(vi, strict, &mut p[..i]);
            p[i] = p[i] + s;
        }
        p.iter_mut().for_each(|x| *x = *x * tau);
        // w = p - (tau / 2)(pᵀv) v, stored back into p
        let k = half * tau * dot(p, v);
        axpy(-k, v, p);

        // A22 -= v wᵀ + w vᵀ (lower triangle only)
        for i in 0..m {
            let row = &mut data[base + i * n..base + i * n + i + 1];
            let (vi, wi) = (v[i], p[i]);
            for ((a_ik, &vk), &wk) in row.iter_mut().zip(&v[..=i]).zip(&p[..=i]) {
                *a_ik = *a_ik - vi * wk - wi * vk;
            }
        }
        reflectors.push(v.to_vec());
        taus.push(tau);
    }
    if n >= 2 {
        diag[n - 2] = data[(n - 2) * n + (n - 2)];
        off[n - 2] = data[(n - 1) * n + (n - 2)];
    }
    if n >= 1 {
        diag[n - 1] = data[(n - 1) * n + (n - 1)];
    }
    Reduction {
        tri: Tridiagonal { diag, off },
        reflectors,
        taus,
    }
}

impl<T: Real> Reduction<T> {
    pub fn dim(&self) -> usize {
        self.tri.diag.len()
    }

    /// Overwrites the `n x r` matrix `y` (eigenvectors of the tridiagonal
    /// form, as columns) with `Q y`, applying reflectors in blocks.
    pub fn back_transform(&self, y: &mut Mat<T>) {
        let n = self.dim();
        assert_eq!(y.rows(), n);
        let r = y.cols();
        let count = self.reflectors.len();
        if r == 0 || count == 0 {
            return;
        }
        const NB: usize = 32;
        let mut end = count;
        while end > 0 {
            let start = end.saturating_sub(NB);
            self.apply_block(start, end, y, r);
            end = start;
        }
    }

    /// Applies `H_start ... H_{end-1}` to `y` via the compact WY form
    /// `I - V Tf Vᵀ` with `Tf` upper triangular.
    fn apply_block(&self, start: usize, end: usize, y: &mut Mat<T>, r: usize) {
        let n = self.dim();
        let nb = end - start;
        let offset = start + 1;
        let m = n - offset;
        // V is m x nb with column i holding reflector start+i shifted by i
        let mut vmat = Mat::<T>::zeros(m, nb);
        for i in 0..nb {
            let refl = &self.reflectors[start + i];
            for (t, &val) in refl.iter().enumerate() {
                vmat[(i + t, i)] = val;
            }
        }
        let mut tf = Mat::<T>::zeros(nb, nb);
        for i in 0..nb {
            let tau = self.taus[start + i];
            tf[(i, i)] = tau;
            if i == 0 || tau == T::zero() {
                continue;
            }
            // z = V[:, 0..i]ᵀ v_i, then Tf[0..i, i] = -tau * Tf[0..i, 0..i] z
            let mut z = vec![T::zero(); i];
            for (c, zc) in z.iter_mut().enumerate() {
                let mut s = T::zero();
                for t in i..m {
                    s = s + vmat[(t, c)] * vmat[(t, i)];
                }
                *zc = s;
            }
            for row in 0..i {
                let mut s = T::zero();
                for c in row..i {
                    s = s + tf[(row, c)] * z[c];
                }
                tf[(row, i)] = -tau * s;
            }
        }
        let ysub = &mut y.as_mut_slice()[offset * r..];
        // W = Vᵀ Ysub (nb x r)
        let mut w = Mat::<T>::zeros(nb, r);
        // SAFETY: vmat is m x nb row-major, ysub is m x r row-major, and w is
        // nb x r; all buffers are distinct and the strides match their shapes.
        unsafe {
            T::gemm_raw(
                nb,
                m,
                r,
                T::one(),
                vmat.as_slice().as_ptr(),
                1,
                nb as isize,
                ysub.as_ptr(),
                r as isize,
                1,
                T::zero(),
                w.as_mut_slice().as_mut_ptr(),
                r as isize,
                1,
            );
        }
        let tw = tf.matmul(&w);
        // SAFETY: Ysub (m x r) -= V (m x nb) * TW (nb x r); no aliasing.
        unsafe {
            T::gemm_raw(
                m,
                nb,
                r,
                -T::one(),
                vmat.as_slice().as_ptr(),
                nb as isize,
                1,
                tw.as_slice().as_ptr(),
                r as isize,
                1,
                T::one(),
                ysub.as_mut_ptr(),
                r as isize,
                1,
            );
        }
    }
}

/// Implicit-shift QL iteration on a tridiagonal matrix.
///
/// Returns eigenvalues in ascending order. When `vectors` is given it must be
/// an `n x n` matrix whose ROWS hold a basis (start from the identity); the
/// rotations are accumulated into those rows, so on return row `i` is the
/// eigenvector for eigenvalue `i`.
pub fn ql_implicit<T: Real>(
    tri: &Tridiagonal<T>,
    mut vectors: Option<&mut Mat<T>>,
) -> Result<Vec<T>> {
    let n = tri.diag.len();
    let mut d = tri.diag.clone();
    let mut e = vec![T::zero(); n];
    e[..n.saturating_sub(1)].copy_from_slice(&tri.off);
    if let Some(z) = vectors.as_deref() {
        assert_eq!(z.shape(), (n, n));
    }
    let eps = T::epsilon();
    let two = T::of(2.0);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let max_iter = 60usize;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::NoConvergence(format!(
                        "QL iteration stalled at index {l} of {n}"
                    )));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = vectors.as_deref_mut() {
                        rotate_rows(z, i, c, s);
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    if let Some(z) = vectors {
        let old = z.clone();
        for (dst, &src) in order.iter().enumerate() {
            z.row_mut(dst).copy_from_slice(old.row(src));
        }
    }
    Ok(values)
}

/// Rows `i, i+1` of `z` <- rotation used by the QL sweep.
#[inline]
fn rotate_rows<T: Real>(z: &mut Mat<T>, i: usize, c: T, s: T) {
    let n = z.cols();
    let data = z.as_mut_slice();
    let (head, tail) = data.split_at_mut((i + 1) * n);
    let zi = &mut head[i * n..];
    let zi1 = &mut tail[..n];
    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}

/// Maximal unreduced diagonal blocks `[start, end)` of a tridiagonal matrix.
fn split_blocks<T: Real>(tri: &Tridiagonal<T>) -> Vec<(usize, usize)> {
    let n = tri.diag.len();
    let eps = T::epsilon();
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 0..n.saturating_sub(1) {
        let tol = eps * (tri.diag[i].abs() + tri.diag[i + 1].abs());
        if tri.off[i].abs() <= tol {
            blocks.push((start, i + 1));
            start = i + 1;
        }
    }
    if n > 0 {
        blocks.push((start, n));
    }
    blocks
}

fn sub_tridiagonal<T: Real>(tri: &Tridiagonal<T>, (a, b): (usize, usize)) -> Tridiagonal<T> {
    Tridiagonal {
        diag: tri.diag[a..b].to_vec(),
        off: tri.off[a..b - 1].to_vec(),
    }
}

/// Eigenpairs of a tridiagonal matrix restricted to the `count` largest
/// eigenvalues. Returns values in descending order and an `n x count`
/// matrix of orthonormal eigenvectors (columns).
///
/// Small blocks use QL with accumulated rotations; larger ones use inverse
/// iteration with Gram-Schmidt inside eigenvalue clusters.
pub fn tridiagonal_top<T: Real>(tri: &Tridiagonal<T>, count: usize) -> Result<(Vec<T>, Mat<T>)> {
    let n = tri.diag.len();
    assert!(count <= n);
    let blocks = split_blocks(tri);

    // (value, block index, rank of the value inside its block)
    let mut candidates: Vec<(T, usize, usize)> = Vec::with_capacity(n);
    let mut block_values = Vec::with_capacity(blocks.len());
    for (b, &range) in blocks.iter().enumerate() {
        let vals = ql_implicit(&sub_tridiagonal(tri, range), None)?;
        for (i, &v) in vals.iter().enumerate() {
            candidates.push((v, b, i));
        }
        block_values.push(vals);
    }
    // stable sort keeps block order for ties
    candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    candidates.truncate(count);

    let mut wanted: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
    for &(_, b, i) in &candidates {
        wanted[b].push(i);
    }

    let mut vectors: Vec<Option<Vec<T>>> = vec![None; count];
    for (b, &(start, end)) in blocks.iter().enumerate() {
        if wanted[b].is_empty() {
            continue;
        }
        let mut idx = wanted[b].clone();
        idx.sort_unstable();
        let sub = sub_tridiagonal(tri, (start, end));
        let local = block_vectors(&sub, &block_values[b], &idx)?;
        for (pos, &i) in idx.iter().enumerate() {
            let slot = candidates
                .iter()
                .position(|&(_, cb, ci)| cb == b && ci == i)
                .expect("selected eigenvalue must be present");
            let mut full = vec![T::zero(); n];
            full[start..end].copy_from_slice(&local[pos]);
            vectors[slot] = Some(full);
        }
    }
    let values = candidates.iter().map(|c| c.0).collect();
    let cols: Vec<Vec<T>> = vectors
        .into_iter()
        .map(|v| v.expect("vector computed"))
        .collect();
    Ok((values, Mat::from_columns(n, &cols)))
}

/// Block size up to which eigenvectors come from QL rotations.
const QL_VECTOR_LIMIT: usize = 256;

/// Eigenvectors of one unreduced block for the ascending-order indices
/// `idx` into `values`.
fn block_vectors<T: Real>(
    sub: &Tridiagonal<T>,
    values: &[T],
    idx: &[usize],
) -> Result<Vec<Vec<T>>> {
    let bn = sub.diag.len();
    if bn == 1 {
        return Ok(vec![vec![T::one()]]);
    }
    if bn <= QL_VECTOR_LIMIT || 4 * idx.len() > 3 * bn && bn <= 2 * QL_VECTOR_LIMIT {
        let mut z = Mat::identity(bn);
        ql_implicit(sub, Some(&mut z))?;
        return Ok(idx.iter().map(|&i| z.row(i).to_vec()).collect());
    }
    Ok(inverse_iteration(sub, values, idx))
}

/// Inverse iteration for the selected eigenvalues of one unreduced block,
/// following the classic scheme: perturbed shifts for near-equal values,
/// scaled random starts, and reorthogonalization inside clusters.
fn inverse_iteration<T: Real>(sub: &Tridiagonal<T>, values: &[T], idx: &[usize]) -> Vec<Vec<T>> {
    let bn = sub.diag.len();
    let eps = T::epsilon();
    let mut onenrm = T::zero();
    for i in 0..bn {
        let mut s = sub.diag[i].abs();
        if i > 0 {
            s = s + sub.off[i - 1].abs();
        }
        if i + 1 < bn {
            s = s + sub.off[i].abs();
        }
        onenrm = onenrm.max(s);
    }
    // vectors further apart than this are only orthogonalized at the end
    let ortol = eps.sqrt() * onenrm;
    let growth_target = (T::of(0.1) / T::of(bn as f64)).sqrt();
    let tiny = eps * onenrm.max(T::min_positive_value());

    let mut out: Vec<Vec<T>> = Vec::with_capacity(idx.len());
    let mut group_start = 0usize;
    let mut prev_shift: Option<T> = None;
    let mut seed: u64 = 0x9E37_79B9_7F4A_7C15;

    for (pos, &i) in idx.iter().enumerate() {
        let mut shift = values[i];
        if let Some(prev) = prev_shift {
            let pertol = T::of(10.0) * (eps * shift).abs().max(tiny);
            if shift - prev < pertol {
                shift = prev + pertol;
            }
            if shift - prev > ortol {
                group_start = pos;
            }
        } else {
            group_start = pos;
        }
        prev_shift = Some(shift);

        let lu = TridiagLu::factor(sub, shift, tiny);
        let mut x: Vec<T> = (0..bn)
            .map(|_| {
                seed = seed
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                T::of(((seed >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0)
            })
            .collect();
        let mut confirmations = 0;
        for _ in 0..6 {
            let l1: T = x.iter().map(|v| v.abs()).sum();
            let scale = T::of(bn as f64) * onenrm * eps.max(lu.last_pivot_abs()) / l1.max(tiny);
            x.iter_mut().for_each(|v| *v = *v * scale);
            lu.solve(&mut x);
            for prev in &out[group_start..pos] {
                let c = dot(&x, prev);
                axpy(-c, prev, &mut x);
            }
            let peak = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            if !peak.is_finite() || peak == T::zero() {
                // restart from a unit vector if the solve degenerated
                x = (0..bn)
                    .map(|t| if t == pos % bn { T::one() } else { T::zero() })
                    .collect();
                continue;
            }
            if peak >= growth_target {
                confirmations += 1;
                if confirmations > 2 {
                    break;
                }
            }
            let s = peak.recip();
            x.iter_mut().for_each(|v| *v = *v * s);
        }
        // final cleanup: two Gram-Schmidt passes keep the cluster orthonormal
        for _ in 0..2 {
            for prev in &out[group_start..pos] {
                let c = dot(&x, prev);
                axpy(-c, prev, &mut x);
            }
            let nrm = norm2(&x);
            x.iter_mut().for_each(|v| *v = *v / nrm);
        }
        out.push(x);
    }
    orthonormalize_in_order(&mut out);
    out
}

/// Two passes of blocked classical Gram-Schmidt over vectors that are
/// already nearly orthonormal; each vector is corrected only against the
/// ones before it.
fn orthonormalize_in_order<T: Real>(vectors: &mut [Vec<T>]) {
    const CHUNK: usize = 32;
    let count = vectors.len();
    let Some(n) = vectors.first().map(|v| v.len()) else {
        return;
    };
    let mut flat = Vec::with_capacity(count * n);
    vectors.iter().for_each(|v| flat.extend_from_slice(v));
    let mut q = Mat::from_vec(count, n, flat).expect("consistent lengths");
    for start in (0..count).step_by(CHUNK) {
        let end = (start + CHUNK).min(count);
        let mut chunk = Mat::from_vec(end - start, n, q.as_slice()[start * n..end * n].to_vec())
            .expect("chunk");
        if start > 0 {
            let prev = Mat::from_vec(start, n, q.as_slice()[..start * n].to_vec()).expect("prefix");
            for _ in 0..2 {
                let coef = chunk.matmul_t(&prev);
                chunk = chunk.sub(&coef.matmul(&prev));
            }
        }
        for i in 0..end - start {
            for _ in 0..2 {
                for j in 0..i {
                    let c = dot(chunk.row(i), chunk.row(j));
                    let (head, tail) = chunk.as_mut_slice().split_at_mut(i * n);
                    axpy(-c, &head[j * n..(j + 1) * n], &mut tail[..n]);
                }
            }
            let nrm = norm2(chunk.row(i));
            chunk.row_mut(i).iter_mut().for_each(|v| *v = *v / nrm);
        }
        q.as_mut_slice()[start * n..end * n].copy_from_slice(chunk.as_slice());
    }
    for (i, v) in vectors.iter_mut().enumerate() {
        v.copy_from_slice(q.row(i));
    }
}

/// LU factorization with partial pivoting of `T - shift * I`.
struct TridiagLu<T> {
    // U has diagonal `d`, first superdiagonal `u1`, second superdiagonal `u2`
    d: Vec<T>,
    u1: Vec<T>,
    u2: Vec<T>,
    mult: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Real> TridiagLu<T> {
    fn factor(tri: &Tridiagonal<T>, shift: T, tiny: T) -> Self {
        let n = tri.diag.len();
        let mut d: Vec<T> = tri.diag.iter().map(|&x| x - shift).collect();
        let mut u1: Vec<T> = tri.off.clone();
        u1.push(T::zero());
        let mut u2 = vec![T::zero(); n];
        let mut mult = vec![T::zero(); n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            let sub = tri.off[i];
            if d[i].abs() >= sub.abs() {
                if d[i] == T::zero() {
                    d[i] = tiny;
                }
                let m = sub / d[i];
                mult[i] = m;
                d[i + 1] = d[i + 1] - m * u1[i];
            } else {
                let m = d[i] / sub;
                mult[i] = m;
                swapped[i] = true;
                let (ui, di1, ui1) = (u1[i], d[i + 1], u1[i + 1]);
                d[i] = sub;
                u1[i] = di1;
                u2[i] = ui1;
                d[i + 1] = ui - m * di1;
                u1[i + 1] = -m * ui1;
            }
        }
        if let Some(last) = d.last_mut() {
            if *last == T::zero() {
                *last = tiny;
            }
        }
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = if *v < T::zero() { -tiny } else { tiny };
            }
        }
        Self {
            d,
            u1,
            u2,
            mult,
            swapped,
        }
    }

    fn last_pivot_abs(&self) -> T {
        self.d.last().map_or(T::zero(), |v| v.abs())
    }

    fn solve(&self, b: &mut [T]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
                b[i + 1] = b[i + 1] - self.mult[i] * b[i];
            } else {
                b[i + 1] = b[i + 1] - self.mult[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s = s - self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                s = s - self.u2[i] * b[i + 2];
            }
            b[i] = s / self.d[i];
        }
    }
}

//! Independent reference implementations used as test oracles. They work on
//! plain nested vectors and share no code with the library.
#![allow(dead_code, clippy::needless_range_loop)]

use pcapp::linalg::Mat;

pub type Dense = Vec<Vec<f64>>;

/// SplitMix64; enough randomness for building test inputs.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed ^ 0x853c_49e6_748f_ea9b)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(1e-300);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn gaussian(&mut self, rows: usize, cols: usize) -> Dense {
        (0..rows)
            .map(|_| (0..cols).map(|_| self.normal()).collect())
            .collect()
    }
}

pub fn to_dense(m: &Mat<f64>) -> Dense {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn to_mat(a: &Dense) -> Mat<f64> {
    Mat::from_rows(a).expect("rectangular")
}

pub fn transpose(a: &Dense) -> Dense {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| a.iter().map(|r| r[j]).collect())
        .collect()
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|t| row[t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

/// `G Gᵀ + shift I`: symmetric positive definite for `shift > 0`.
pub fn random_spd(rng: &mut TestRng, d: usize, shift: f64) -> Dense {
    let g = rng.gaussian(d, d);
    let mut s = mul(&g, &transpose(&g));
    for (i, row) in s.iter_mut().enumerate() {
        row[i] += shift;
    }
    s
}

pub fn random_symmetric(rng: &mut TestRng, d: usize) -> Dense {
    let g = rng.gaussian(d, d);
    (0..d)
        .map(|i| (0..d).map(|j| 0.5 * (g[i][j] + g[j][i])).collect())
        .collect()
}

/// Cyclic Jacobi rotations. Returns eigenvalues in descending order and the
/// matching eigenvectors as columns.
pub fn jacobi_eig(a: &Dense) -> (Vec<f64>, Dense) {
    let n = a.len();
    let mut m = a.clone();
    let mut v: Dense = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let total: f64 = m.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).unwrap());
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = (0..n)
        .map(|r| order.iter().map(|&c| v[r][c]).collect())
        .collect();
    (values, vectors)
}

/// Lower-triangular `L` with `L Lᵀ = a`.
pub fn cholesky(a: &Dense) -> Dense {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|t| l[i][t] * l[j][t]).sum();
            if i == j {
                let v = a[i][i] - s;
                assert!(v > 0.0, "matrix is not positive definite");
                l[i][i] = v.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    l
}

/// Inverse of a lower-triangular matrix by forward substitution.
pub fn lower_inverse(l: &Dense) -> Dense {
    let n = l.len();
    let mut inv = vec![vec![0.0; n]; n];
    for c in 0..n {
        for i in c..n {
            let rhs = if i == c { 1.0 } else { 0.0 };
            let s: f64 = (c..i).map(|t| l[i][t] * inv[t][c]).sum();
            inv[i][c] = (rhs - s) / l[i][i];
        }
    }
    inv
}

/// Generalized eigenpairs of `s_plus v = θ s v` for SPD `s`, through the
/// Cholesky reduction `L⁻¹ S⁺ L⁻ᵀ`. Vectors satisfy `vᵀ S v = 1`.
pub fn brute_force_generalized(s_plus: &Dense, s: &Dense) -> (Vec<f64>, Dense) {
    let linv = lower_inverse(&cholesky(s));
    let c = mul(&mul(&linv, s_plus), &transpose(&linv));
    let sym: Dense = (0..c.len())
        .map(|i| (0..c.len()).map(|j| 0.5 * (c[i][j] + c[j][i])).collect())
        .collect();
    let (values, y) = jacobi_eig(&sym);
    (values, mul(&transpose(&linv), &y))
}

/// Singular values of a rectangular matrix by one-sided Jacobi, descending.
pub fn jacobi_singular_values(a: &Dense) -> Vec<f64> {
    let mut cols = transpose(a);
    let n = cols.len();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..cols[p].len() {
                    let (x, y) = (cols[p][r], cols[q][r]);
                    cols[p][r] = c * x - s * y;
                    cols[q][r] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Injective assignment of population values to sample values minimizing
/// the total absolute mismatch, by trying every arrangement.
pub fn best_pairing(sample: &[f64], population: &[f64]) -> Vec<usize> {
    fn search(
        i: usize,
        sample: &[f64],
        population: &[f64],
        used: &mut Vec<bool>,
        current: &mut Vec<usize>,
        best: &mut (f64, Vec<usize>),
        cost: f64,
    ) {
        if cost >= best.0 {
            return;
        }
        if i == population.len() {
            *best = (cost, current.clone());
            return;
        }
        for j in 0..sample.len() {
            if !used[j] {
                used[j] = true;
                current.push(j);
                let c = cost + (sample[j] - population[i]).abs();
                search(i + 1, sample, population, used, current, best, c);
                current.pop();
                used[j] = false;
            }
        }
    }
    let mut best = (f64::INFINITY, Vec::new());
    search(
        0,
        sample,
        population,
        &mut vec![false; sample.len()],
        &mut Vec::new(),
        &mut best,
        0.0,
    );
    best.1
}

/// Largest absolute entry of `a - b`.
pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

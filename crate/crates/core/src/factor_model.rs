//! Contrastive factor model: loadings and positive-pair sampling.
//!
//! Each pair shares the signal factor and draws its own background and noise:
//! `x = A w + B h + ε`, `x⁺ = A w + B h' + ε'`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::qr::thin_qr;
use crate::linalg::{Mat, SymmetricMatrix};
use crate::scalar::Real;

/// Distribution of the latent factors and the noise (mean 0, variance 1).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FactorDistribution {
    #[default]
    Gaussian,
    /// `Beta(2, 2)` standardized as `(b - 1/2) * sqrt(20)`.
    Beta22,
}

impl FactorDistribution {
    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Beta22 => "beta22",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gaussian" | "normal" => Some(Self::Gaussian),
            "beta22" | "beta" => Some(Self::Beta22),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorModelSpec<T> {
    pub d: usize,
    /// Signal variances, non-increasing.
    pub signal_variances: Vec<T>,
    /// Background variances, non-increasing.
    pub background_variances: Vec<T>,
    pub noise_variance: T,
    /// `(signal_index, background_index)`: the background column is placed on
    /// the coordinate of that signal column instead of its default slot.
    pub overlap_pairs: Vec<(usize, usize)>,
    pub factor_distribution: FactorDistribution,
    /// Applies one Haar-random orthogonal transform to all loadings.
    pub rotation_seed: Option<u64>,
}

impl<T: Real> FactorModelSpec<T> {
    pub fn new(d: usize, signal_variances: Vec<T>, background_variances: Vec<T>) -> Self {
        Self {
            d,
            signal_variances,
            background_variances,
            noise_variance: T::one(),
            overlap_pairs: Vec::new(),
            factor_distribution: FactorDistribution::Gaussian,
            rotation_seed: None,
        }
    }

    pub fn k(&self) -> usize {
        self.signal_variances.len()
    }

    pub fn m(&self) -> usize {
        self.background_variances.len()
    }

    /// Row index of every background column.
    fn background_coordinates(&self) -> Result<Vec<usize>> {
        let (d, k, m) = (self.d, self.k(), self.m());
        let mut coords: Vec<Option<usize>> = vec![None; m];
        for &(i, j) in &self.overlap_pairs {
            if i >= k || j >= m {
                return Err(Error::InvalidSpec(format!(
                    "overlap pair ({i}, {j}) out of range for k = {k}, m = {m}"
                )));
            }
            if coords[j].is_some() {
                return Err(Error::InvalidSpec(format!(
                    "background column {j} overlaps twice"
                )));
            }
            coords[j] = Some(i);
        }
        let mut owner: Vec<Option<usize>> = vec![None; d];
        for (j, c) in coords.iter_mut().enumerate() {
            let row = match *c {
                Some(i) => i,
                None => {
                    if j >= d {
                        return Err(Error::InvalidSpec(format!(
                            "background column {j} has no coordinate in dimension {d}"
                        )));
                    }
                    let row = d - 1 - j;
                    if row < k {
                        return Err(Error::InvalidSpec(format!(
                            "background column {j} collides with signal coordinate {row}"
                        )));
                    }
                    row
                }
            };
            if let Some(prev) = owner[row] {
                return Err(Error::InvalidSpec(format!(
                    "background columns {prev} and {j} share coordinate {row}"
                )));
            }
            owner[row] = Some(j);
            *c = Some(row);
        }
        Ok(coords
            .into_iter()
            .map(|c| c.expect("assigned above"))
            .collect())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.d == 0 {
            return bad("dimension must be positive".into());
        }
        if self.k() == 0 {
            return bad("at least one signal variance is required".into());
        }
        if self.k() > self.d {
            return bad(format!(
                "{} signal directions do not fit in dimension {}",
                self.k(),
                self.d
            ));
        }
        for (name, vals) in [
            ("signal", &self.signal_variances),
            ("background", &self.background_variances),
        ] {
            if vals.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
                return bad(format!("{name} variances must be positive and finite"));
            }
            if vals.windows(2).any(|w| w[1] > w[0]) {
                return bad(format!("{name} variances must be in non-increasing order"));
            }
        }
        if !(self.noise_variance >= T::zero()) || !self.noise_variance.is_finite() {
            return bad("noise variance must be finite and nonnegative".into());
        }
        self.background_coordinates().map(|_| ())
    }
}

/// Loading matrices `A` (`d x k`) and `B` (`d x m`).
#[derive(Clone, Debug)]
pub struct Loadings<T> {
    pub a: Mat<T>,
    pub b: Mat<T>,
}

impl<T: Real> Loadings<T> {
    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// Orthonormal basis of the signal subspace (normalized columns of `A`).
    pub fn truth(&self) -> Mat<T> {
        let mut u = self.a.clone();
        let norms: Vec<T> = (0..u.cols())
            .map(|j| crate::scalar::norm2(&u.column(j)).recip())
            .collect();
        u.scale_columns(&norms);
        u
    }
}

/// Axis-aligned loadings: signal spikes on the first `k` coordinates,
/// background spikes on the last `m` coordinates in reverse order.
pub fn build_loadings<T: Real>(spec: &FactorModelSpec<T>) -> Result<Loadings<T>> {
    spec.validate()?;
    let (d, k, m) = (spec.d, spec.k(), spec.m());
    let mut a = Mat::zeros(d, k);
    for (j, &v) in spec.signal_variances.iter().enumerate() {
        a[(j, j)] = v.sqrt();
    }
    let mut b = Mat::zeros(d, m);
    for (j, row) in spec.background_coordinates()?.into_iter().enumerate() {
        b[(row, j)] = spec.background_variances[j].sqrt();
    }
    if let Some(seed) = spec.rotation_seed {
        let q = haar_orthogonal::<T>(d, seed);
        a = q.matmul(&a);
        b = q.matmul(&b);
    }
    Ok(Loadings { a, b })
}

/// Uniformly random orthogonal matrix (QR of a Gaussian matrix with the
/// `diag(R) > 0` convention).
pub fn haar_orthogonal<T: Real>(d: usize, seed: u64) -> Mat<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Mat::from_fn(d, d, |_, _| T::of(rng.sample::<f64, _>(StandardNormal)));
    thin_qr(&g).0
}

/// Paired observations `X`, `X⁺` (`n x d`) and the true signal basis.
#[derive(Clone, Debug)]
pub struct PairedDataset<T> {
    pub x: Mat<T>,
    pub x_plus: Mat<T>,
    pub truth: Mat<T>,
}

impl<T: Real> PairedDataset<T> {
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }
}

/// Draws `n` positive pairs.
///
/// The stream is a ChaCha8 generator seeded with `seed` on a stream chosen
/// from `(n, d)`, so equal seeds at different sizes do not share draws.
pub fn sample_pairs<T: Real>(
    loadings: &Loadings<T>,
    n: usize,
    noise_variance: T,
    distribution: FactorDistribution,
    seed: u64,
) -> Result<PairedDataset<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be positive".into()));
    }
    if !(noise_variance >= T::zero()) || !noise_variance.is_finite() {
        return Err(Error::InvalidInput(
            "noise variance must be finite and nonnegative".into(),
        ));
    }
    let d = loadings.dim();
    let (k, m) = (loadings.a.cols(), loadings.b.cols());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) ^ d as u64);
    let mut draw = FactorSampler::new(distribution);

    let w = Mat::from_fn(n, k, |_, _| draw.sample(&mut rng));
    let h = Mat::from_fn(n, m, |_, _| draw.sample(&mut rng));
    let h_plus = Mat::from_fn(n, m, |_, _| draw.sample(&mut rng));
    let sigma = noise_variance.sqrt();
    let mut x = Mat::from_fn(n, d, |_, _| sigma * draw.sample(&mut rng));
    let mut x_plus = Mat::from_fn(n, d, |_, _| sigma * draw.sample(&mut rng));

    let signal = w.matmul_t(&loadings.a);
    x = x.add(&signal).add(&h.matmul_t(&loadings.b));
    x_plus = x_plus.add(&signal).add(&h_plus.matmul_t(&loadings.b));
    Ok(PairedDataset {
        x,
        x_plus,
        truth: loadings.truth(),
    })
}

struct FactorSampler {
    beta: Option<Beta<f64>>,
}

impl FactorSampler {
    fn new(distribution: FactorDistribution) -> Self {
        let beta = match distribution {
            FactorDistribution::Gaussian => None,
            FactorDistribution::Beta22 => {
                Some(Beta::new(2.0, 2.0).expect("valid shape parameters"))
            }
        };
        Self { beta }
    }

    #[inline]
    fn sample<T: Real, R: Rng>(&mut self, rng: &mut R) -> T {
        match &self.beta {
            None => T::of(rng.sample::<f64, _>(StandardNormal)),
            Some(b) => T::of((b.sample(rng) - 0.5) * 20f64.sqrt()),
        }
    }
}

/// `A Aᵀ + B Bᵀ + σ² I`.
pub fn population_covariance<T: Real>(
    loadings: &Loadings<T>,
    noise_variance: T,
) -> SymmetricMatrix<T> {
    let d = loadings.dim();
    let mut sigma = loadings
        .a
        .matmul_t(&loadings.a)
        .add(&loadings.b.matmul_t(&loadings.b));
    for i in 0..d {
        sigma[(i, i)] = sigma[(i, i)] + noise_variance;
    }
    SymmetricMatrix::new(sigma).expect("square by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_matches_reference_matrices() {
        let spec = FactorModelSpec::new(
            10,
            vec![50.0, 25.0, 20.0, 15.0, 10.0],
            vec![500.0, 400.0, 300.0, 200.0, 100.0],
        );
        let l = build_loadings(&spec).unwrap();
        assert_eq!(l.a[(0, 0)], 50f64.sqrt());
        assert_eq!(l.a[(4, 4)], 10f64.sqrt());
        assert_eq!(l.b[(9, 0)], 500f64.sqrt());
        assert_eq!(l.b[(5, 4)], 100f64.sqrt());
        assert_eq!(l.a.t_matmul(&l.b).max_abs(), 0.0);
    }

    #[test]
    fn one_signal_one_background() {
        let l = build_loadings(&FactorModelSpec::new(2, vec![10.0], vec![500.0])).unwrap();
        assert_eq!(l.a.column(0), vec![10f64.sqrt(), 0.0]);
        assert_eq!(l.b.column(0), vec![0.0, 500f64.sqrt()]);
    }

    #[test]
    fn overlap_places_columns_on_signal_coordinates() {
        let mut spec = FactorModelSpec::new(
            12,
            vec![50.0, 25.0, 20.0, 15.0, 10.0],
            vec![500.0, 400.0, 300.0, 25.0, 12.5],
        );
        spec.overlap_pairs = vec![(3, 3), (4, 4)];
        let l = build_loadings(&spec).unwrap();
        assert_eq!(l.b[(3, 3)], 25f64.sqrt());
        assert_eq!(l.b[(4, 4)], 12.5f64.sqrt());
        let atb = l.a.t_matmul(&l.b);
        let nonzero = atb.as_slice().iter().filter(|v| **v != 0.0).count();
        assert_eq!(nonzero, 2);
        let pop = population_covariance(&l, 1.0);
        assert!((pop.get(3, 3) - (15.0 + 25.0 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        // background would land on a signal coordinate
        let spec = FactorModelSpec::new(3, vec![5.0, 4.0], vec![9.0, 8.0]);
        assert!(matches!(build_loadings(&spec), Err(Error::InvalidSpec(_))));
        let spec = FactorModelSpec::new(5, vec![4.0, 5.0], vec![]);
        assert!(build_loadings(&spec).is_err());
        let mut spec = FactorModelSpec::new(6, vec![5.0, 4.0], vec![9.0]);
        spec.overlap_pairs = vec![(0, 0), (1, 0)];
        assert!(build_loadings(&spec).is_err());
        assert!(build_loadings(&FactorModelSpec::new(4, vec![-1.0], vec![])).is_err());
    }

    #[test]
    fn population_covariance_of_reference_example() {
        let l = build_loadings(&FactorModelSpec::new(5, vec![10.0], vec![500.0])).unwrap();
        let pop = population_covariance(&l, 1.0);
        let expect = Mat::from_diag(&[11.0, 1.0, 1.0, 1.0, 501.0]);
        assert!(pop.as_mat().sub(&expect).max_abs() < 1e-12);
    }

    #[test]
    fn pairs_share_signal_only() {
        let l = build_loadings(&FactorModelSpec::new(6, vec![4.0, 2.0], vec![])).unwrap();
        let ds = sample_pairs(&l, 50, 0.0, FactorDistribution::Gaussian, 3).unwrap();
        assert_eq!(ds.x, ds.x_plus);
        let again = sample_pairs(&l, 50, 0.0, FactorDistribution::Gaussian, 3).unwrap();
        assert_eq!(ds.x, again.x);
    }

    #[test]
    fn rotation_keeps_structure() {
        let mut spec = FactorModelSpec::<f64>::new(8, vec![4.0, 2.0], vec![9.0, 3.0]);
        spec.rotation_seed = Some(17);
        let l = build_loadings(&spec).unwrap();
        assert!(l.a.t_matmul(&l.b).max_abs() < 1e-12);
        let t = l.truth();
        assert!(t.t_matmul(&t).sub(&Mat::identity(2)).max_abs() < 1e-12);
        assert!((crate::scalar::norm2(&l.b.column(0)) - 3.0).abs() < 1e-12);
    }
}

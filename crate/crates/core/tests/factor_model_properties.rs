use pcapp::estimators::{contrastive_cov, sample_cov};
use pcapp::factor_model::{
    build_loadings, population_covariance, sample_pairs, FactorDistribution, FactorModelSpec,
};
use pcapp::linalg::qr::orthonormality_defect;
use pcapp::linalg::sym_eig;
use pcapp::Error;

fn moments(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let fourth = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    (mean, var, fourth / (var * var))
}

/// Standardized Beta(2, 2) draws: mean 0, variance 1, bounded by √5 and
/// with fourth moment 3 − 6/7.
#[test]
fn beta_factors_are_standardized() {
    let mut spec = FactorModelSpec::<f64>::new(1, vec![4.0], vec![]);
    spec.noise_variance = 0.0;
    spec.factor_distribution = FactorDistribution::Beta22;
    let l = build_loadings(&spec).unwrap();
    let ds = sample_pairs(&l, 200_000, 0.0, FactorDistribution::Beta22, 11).unwrap();
    let w: Vec<f64> = ds.x.as_slice().iter().map(|v| v / 2.0).collect();
    let (mean, var, kurt) = moments(&w);
    assert!(mean.abs() < 0.01, "mean {mean}");
    assert!((var - 1.0).abs() < 0.01, "variance {var}");
    assert!((kurt - 15.0 / 7.0).abs() < 0.03, "kurtosis {kurt}");
    assert!(w.iter().all(|v| v.abs() <= 5f64.sqrt() + 1e-12));
    // the paired view shares the signal factor exactly
    assert_eq!(ds.x.as_slice(), ds.x_plus.as_slice());
}

#[test]
fn sample_covariance_concentrates() {
    for dist in [FactorDistribution::Gaussian, FactorDistribution::Beta22] {
        let mut spec = FactorModelSpec::<f64>::new(8, vec![10.0, 5.0], vec![30.0, 20.0]);
        spec.factor_distribution = dist;
        let l = build_loadings(&spec).unwrap();
        let ds = sample_pairs(&l, 40_000, 1.0, dist, 3).unwrap();
        let pop = population_covariance(&l, 1.0);
        let s = sample_cov(&ds.x).unwrap();
        let rel = s.as_mat().sub(pop.as_mat()).frobenius_norm() / pop.as_mat().frobenius_norm();
        assert!(rel < 0.03, "{} relative error {rel}", dist.name());
        // the contrastive covariance sees the signal and little else
        let sp = contrastive_cov(&ds.x, &ds.x_plus).unwrap();
        let signal = l.a.matmul_t(&l.a);
        let worst = sp.as_mat().sub(&signal).max_abs();
        assert!(
            worst < 0.1 * 30.0,
            "{} contrastive deviation {worst}",
            dist.name()
        );
        for row in [6, 7] {
            assert!(sp.get(row, row).abs() < 0.1 * 30.0 / 3.0);
        }
    }
}

#[test]
fn draws_are_reproducible() {
    let spec = FactorModelSpec::<f64>::new(6, vec![3.0], vec![2.0]);
    let l = build_loadings(&spec).unwrap();
    let a = sample_pairs(&l, 50, 1.0, FactorDistribution::Gaussian, 9).unwrap();
    let b = sample_pairs(&l, 50, 1.0, FactorDistribution::Gaussian, 9).unwrap();
    let c = sample_pairs(&l, 50, 1.0, FactorDistribution::Gaussian, 10).unwrap();
    assert_eq!(a.x.as_slice(), b.x.as_slice());
    assert_eq!(a.x_plus.as_slice(), b.x_plus.as_slice());
    assert_ne!(a.x.as_slice(), c.x.as_slice());
}

#[test]
fn rotated_model_keeps_its_spectrum() {
    let mut spec = FactorModelSpec::<f64>::new(7, vec![9.0, 4.0], vec![16.0]);
    spec.rotation_seed = Some(5);
    let l = build_loadings(&spec).unwrap();
    let truth = l.truth();
    assert!(orthonormality_defect(&truth) < 1e-12);
    assert!(
        truth.max_abs() < 1.0 - 1e-6,
        "rotation left the truth on the axes"
    );
    let eig = sym_eig(&population_covariance(&l, 1.0)).unwrap();
    let expect = [17.0, 10.0, 5.0, 1.0, 1.0, 1.0, 1.0];
    for (v, e) in eig.values.iter().zip(expect) {
        assert!((v - e).abs() < 1e-10);
    }
}

#[test]
fn overlapping_background_shares_signal_coordinates() {
    let mut spec = FactorModelSpec::<f64>::new(
        12,
        vec![50.0, 25.0, 20.0, 15.0, 10.0],
        vec![500.0, 400.0, 300.0, 100.0, 50.0],
    );
    spec.overlap_pairs = vec![(3, 3), (4, 4)];
    let l = build_loadings(&spec).unwrap();
    assert_eq!(l.b[(3, 3)], 10.0);
    assert_eq!(l.b[(4, 4)], 50f64.sqrt());
    assert_eq!(l.b[(11, 0)], 500f64.sqrt());
    let mut bad = spec.clone();
    bad.overlap_pairs = vec![(3, 3), (4, 3)];
    assert!(matches!(bad.validate(), Err(Error::InvalidSpec(_))));
    let mut crowded = FactorModelSpec::<f64>::new(3, vec![2.0, 1.0], vec![5.0, 4.0]);
    assert!(crowded.validate().is_err());
    crowded.d = 4;
    assert!(crowded.validate().is_ok());
}

mod support;

use pcapp::factor_model::haar_orthogonal;
use pcapp::linalg::qr::orthonormalize;
use pcapp::linalg::Mat;
use pcapp::metrics::{match_to_population, principal_angles, sin_theta_dist, DistanceNorm};
use proptest::prelude::*;
use support::*;

fn random_basis(seed: u64, d: usize, k: usize) -> Mat<f64> {
    let mut rng = TestRng::new(seed);
    orthonormalize(&to_mat(&rng.gaussian(d, k)))
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=12).prop_flat_map(|d| (Just(d), 1usize..=d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn symmetric_in_its_arguments(seed in any::<u64>(), (d, k) in dims()) {
        let u = random_basis(seed, d, k);
        let v = random_basis(seed.wrapping_add(1), d, k);
        for norm in [DistanceNorm::Operator, DistanceNorm::Frobenius] {
            let a = sin_theta_dist(&u, &v, norm).unwrap();
            let b = sin_theta_dist(&v, &u, norm).unwrap();
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn stays_in_range(seed in any::<u64>(), (d, k) in dims()) {
        let u = random_basis(seed, d, k);
        let v = random_basis(seed ^ 0xabc, d, k);
        let op = sin_theta_dist(&u, &v, DistanceNorm::Operator).unwrap();
        let fro = sin_theta_dist(&u, &v, DistanceNorm::Frobenius).unwrap();
        prop_assert!((0.0..=1.0).contains(&op));
        prop_assert!(fro >= 0.0 && fro <= (k as f64).sqrt() + 1e-12);
        prop_assert!(sin_theta_dist(&u, &u, DistanceNorm::Operator).unwrap() <= 1e-7);
    }

    #[test]
    fn invariant_under_common_rotation(seed in any::<u64>(), (d, k) in dims()) {
        let u = random_basis(seed, d, k);
        let v = random_basis(seed ^ 0x55, d, k);
        let q = haar_orthogonal::<f64>(d, seed ^ 0x77);
        let before = principal_angles(&u, &v).unwrap();
        let after = principal_angles(&q.matmul(&u), &q.matmul(&v)).unwrap();
        for (a, b) in before.sines.iter().zip(&after.sines) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn independent_of_the_chosen_basis(seed in any::<u64>(), (d, k) in dims()) {
        let u = random_basis(seed, d, k);
        let v = random_basis(seed ^ 0x99, d, k);
        let r = haar_orthogonal::<f64>(k, seed ^ 0x11);
        let before = principal_angles(&u, &v).unwrap();
        let after = principal_angles(&u.matmul(&r), &v).unwrap();
        for (a, b) in before.angles.iter().zip(&after.angles) {
            prop_assert!((a - b).abs() <= 1e-10 || (a.cos() - b.cos()).abs() <= 1e-10);
        }
        for (a, b) in before.sines.iter().zip(&after.sines) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    /// `‖UUᵀ − U′U′ᵀ‖_F = √2 · dist_F`.
    #[test]
    fn frobenius_distance_matches_projector_gap(seed in any::<u64>(), (d, k) in dims()) {
        let u = random_basis(seed, d, k);
        let v = random_basis(seed ^ 0x1234, d, k);
        let gap = u.matmul_t(&u).sub(&v.matmul_t(&v)).frobenius_norm();
        let dist = sin_theta_dist(&u, &v, DistanceNorm::Frobenius).unwrap();
        prop_assert!((gap - 2f64.sqrt() * dist).abs() <= 1e-8);
    }

    /// Cosines agree with singular values of `UᵀU′` from one-sided Jacobi.
    #[test]
    fn cosines_match_jacobi_svd(seed in any::<u64>(), (d, k) in dims()) {
        let u = random_basis(seed, d, k);
        let v = random_basis(seed ^ 0x4321, d, k);
        let reference = jacobi_singular_values(&to_dense(&u.t_matmul(&v)));
        let set = principal_angles(&u, &v).unwrap();
        for (a, b) in set.cosines.iter().zip(&reference) {
            prop_assert!((a - b.min(1.0)).abs() <= 1e-10);
        }
    }

    /// Non-orthonormal spanning sets give the same angles as their
    /// orthonormalized versions.
    #[test]
    fn spans_not_bases_matter(seed in any::<u64>(), (d, k) in dims()) {
        let mut rng = TestRng::new(seed);
        let raw = to_mat(&rng.gaussian(d, k));
        let v = random_basis(seed ^ 0x2222, d, k);
        let a = sin_theta_dist(&raw, &v, DistanceNorm::Frobenius).unwrap();
        let b = sin_theta_dist(&orthonormalize(&raw), &v, DistanceNorm::Frobenius).unwrap();
        prop_assert!((a - b).abs() <= 1e-8);
    }

    /// Perturbations below half the smallest population gap leave the
    /// greedy matching equal to the exhaustive optimum and to sorted order.
    #[test]
    fn matching_agrees_with_exhaustive_pairing(
        seed in any::<u64>(),
        extra in 0usize..=2,
        count in 1usize..=4,
    ) {
        let mut rng = TestRng::new(seed);
        let mut population: Vec<f64> = (0..count).map(|_| 1.0 + 100.0 * rng.uniform()).collect();
        population.sort_by(|a, b| b.partial_cmp(a).unwrap());
        population.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        let mut gap = f64::INFINITY;
        for w in population.windows(2) {
            gap = gap.min(w[0] - w[1]);
        }
        let radius = if gap.is_finite() { 0.49 * gap } else { 1.0 };
        let mut sample: Vec<f64> = population.iter().map(|p| p + radius * (2.0 * rng.uniform() - 1.0)).collect();
        let last = *population.last().unwrap();
        for t in 0..extra {
            // decoys well below every population value
            sample.push(last - 10.0 * radius - 5.0 * (t + 1) as f64);
        }
        let greedy = match_to_population(&sample, &population).unwrap();
        let exhaustive = best_pairing(&sample, &population);
        prop_assert_eq!(&greedy, &exhaustive);
        let sorted: Vec<usize> = (0..population.len()).collect();
        prop_assert_eq!(greedy, sorted);
    }
}

#[test]
fn mismatched_widths_report_the_narrower_count() {
    let u = random_basis(1, 6, 3);
    let v = random_basis(2, 6, 2);
    let set = principal_angles(&u, &v).unwrap();
    assert!(set.dimension_mismatch);
    assert_eq!(set.len(), 2);
    // a subspace contained in the other has zero angles
    let w = u.select_columns(&[0, 2]);
    let inner = principal_angles(&u, &w).unwrap();
    assert!(inner.distance(DistanceNorm::Operator) < 1e-8);
}

#[test]
fn tiny_angles_are_resolved() {
    let t = 1e-9f64;
    let u = Mat::from_columns(3, &[[1.0, 0.0, 0.0]]);
    let v = Mat::from_columns(3, &[[t.cos(), t.sin(), 0.0]]);
    let s = sin_theta_dist(&u, &v, DistanceNorm::Operator).unwrap();
    assert!((s - t.sin()).abs() < 1e-18, "{s}");
}

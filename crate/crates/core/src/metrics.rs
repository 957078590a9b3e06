//! Principal angles between subspaces and the sin-Θ distance.

use std::str::FromStr;

use crate::error::{invalid, Result};
use crate::linalg::qr::{orthonormality_defect, thin_qr};
use crate::linalg::svd::singular_values;
use crate::linalg::Mat;
use crate::scalar::Real;

/// Inputs further than this from orthonormal are re-orthonormalized.
const ORTHONORMAL_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DistanceNorm {
    /// Largest sine (spectral norm of `sin Θ`).
    #[default]
    Operator,
    /// `sqrt(Σ sin² θⱼ)`.
    Frobenius,
}

impl DistanceNorm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Operator => "operator",
            Self::Frobenius => "frobenius",
        }
    }
}

impl FromStr for DistanceNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "operator" | "spectral" => Ok(Self::Operator),
            "frobenius" => Ok(Self::Frobenius),
            other => Err(format!("unknown norm `{other}`")),
        }
    }
}

/// Principal angles between two subspaces.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalAngleSet<T> {
    /// Singular values of `UᵀU'`, clamped to `[0, 1]`, descending.
    pub cosines: Vec<T>,
    /// `arccos` of the cosines, ascending.
    pub angles: Vec<T>,
    /// Sines of the angles, ascending, computed from the residual of one
    /// basis after projection onto the other (accurate for tiny angles).
    pub sines: Vec<T>,
    /// The two bases had different column counts; `min(k, k')` angles kept.
    pub dimension_mismatch: bool,
}

impl<T: Real> PrincipalAngleSet<T> {
    pub fn len(&self) -> usize {
        self.cosines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosines.is_empty()
    }

    pub fn distance(&self, norm: DistanceNorm) -> T {
        match norm {
            DistanceNorm::Operator => self.sines.last().copied().unwrap_or(T::zero()),
            DistanceNorm::Frobenius => self.sines.iter().map(|&s| s * s).sum::<T>().sqrt(),
        }
    }
}

fn ensure_orthonormal<T: Real>(u: &Mat<T>) -> Result<Mat<T>> {
    if u.rows() < u.cols() {
        return Err(invalid(format!(
            "basis with {} columns in dimension {}",
            u.cols(),
            u.rows()
        )));
    }
    if !u.is_finite() {
        return Err(invalid("basis has non-finite entries"));
    }
    if orthonormality_defect(u) > T::of(ORTHONORMAL_TOLERANCE) {
        Ok(thin_qr(u).0)
    } else {
        Ok(u.clone())
    }
}

pub fn principal_angles<T: Real>(u: &Mat<T>, u_prime: &Mat<T>) -> Result<PrincipalAngleSet<T>> {
    if u.rows() != u_prime.rows() {
        return Err(invalid(format!(
            "bases live in different dimensions: {} vs {}",
            u.rows(),
            u_prime.rows()
        )));
    }
    let a = ensure_orthonormal(u)?;
    let b = ensure_orthonormal(u_prime)?;
    // the narrower basis is projected onto the wider one
    let (small, wide) = if a.cols() <= b.cols() {
        (&a, &b)
    } else {
        (&b, &a)
    };
    let m = small.cols();
    let c = wide.t_matmul(small);
    let mut cosines = singular_values(&c);
    cosines.iter_mut().for_each(|v| *v = v.min(T::one()));
    let residual = small.sub(&wide.matmul(&c));
    let mut sines = singular_values(&residual);
    sines.iter_mut().for_each(|v| *v = v.min(T::one()));
    sines.reverse();
    let angles = cosines.iter().map(|c| c.acos()).collect();
    debug_assert_eq!(sines.len(), m);
    Ok(PrincipalAngleSet {
        cosines,
        angles,
        sines,
        dimension_mismatch: a.cols() != b.cols(),
    })
}

/// `‖sin Θ(U, U')‖` in the chosen norm.
pub fn sin_theta_dist<T: Real>(u: &Mat<T>, u_prime: &Mat<T>, norm: DistanceNorm) -> Result<T> {
    Ok(principal_angles(u, u_prime)?.distance(norm))
}

/// Pairs every population eigenvalue (taken in descending order) with the
/// closest still-unmatched sample eigenvalue. Entry `i` of the result is the
/// sample index assigned to population value `i`.
pub fn match_to_population<T: Real>(
    sample_values: &[T],
    population_values: &[T],
) -> Result<Vec<usize>> {
    if sample_values.len() < population_values.len() {
        return Err(invalid(format!(
            "{} sample values cannot cover {} population values",
            sample_values.len(),
            population_values.len()
        )));
    }
    let mut order: Vec<usize> = (0..population_values.len()).collect();
    order.sort_by(|&i, &j| {
        population_values[j]
            .partial_cmp(&population_values[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut used = vec![false; sample_values.len()];
    let mut assignment = vec![0; population_values.len()];
    for i in order {
        let target = population_values[i];
        let best = (0..sample_values.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                let da = (sample_values[a] - target).abs();
                let db = (sample_values[b] - target).abs();
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("enough sample values remain");
        used[best] = true;
        assignment[i] = best;
    }
    Ok(assignment)
}

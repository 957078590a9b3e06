//! Closed-form high-dimensional predictions for the subspace error.
//!
//! All inputs and outputs are plain `f64`; these are scalar formulas.

use crate::error::{invalid, Result};

/// Prediction together with whether the spike is above the detection
/// threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub dist: f64,
    /// `false` when the spike sits below `sqrt(c)` and the prediction is the
    /// total-loss value 1.
    pub detectable: bool,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(invalid(format!(
            "{name} must be nonnegative and finite, got {v}"
        )));
    }
    Ok(())
}

/// Limiting PCA++ error at fixed aspect ratio `c = d/n` for the weakest
/// signal spike `λ`: `dist² = 1 - (1 - c/λ²) / (1 + c/λ)`.
pub fn fixed_aspect_error(lambda: f64, c: f64) -> Result<Prediction> {
    positive("lambda", lambda)?;
    nonnegative("c", c)?;
    if !bbp_detectable(lambda, c) {
        return Ok(Prediction {
            dist: 1.0,
            detectable: false,
        });
    }
    let sq = 1.0 - (1.0 - c / (lambda * lambda)) / (1.0 + c / lambda);
    Ok(Prediction {
        dist: sq.clamp(0.0, 1.0).sqrt(),
        detectable: true,
    })
}

/// Limiting PCA++ error when spikes grow with the dimension, in terms of
/// `c_A = d / (n λ)`: `dist² = c_A / (1 + c_A)`.
pub fn growing_spike_error(c_a: f64) -> Result<f64> {
    nonnegative("c_A", c_a)?;
    Ok((c_a / (1.0 + c_a)).sqrt())
}

/// Upper bound on the squared alignment of the leading PCA+ direction with
/// the signal axis under a strong background: `min(1, 2λ_A / sqrt(λ_B c))`.
pub fn pca_plus_alignment_bound(lambda_a: f64, lambda_b: f64, c: f64) -> Result<f64> {
    positive("lambda_A", lambda_a)?;
    positive("lambda_B", lambda_b)?;
    positive("c", c)?;
    Ok((2.0 * lambda_a / (lambda_b * c).sqrt()).min(1.0))
}

/// Whether a spike of size `λ` separates from the noise bulk: `λ >= sqrt(c)`.
pub fn bbp_detectable(lambda: f64, c: f64) -> bool {
    lambda >= c.sqrt()
}

/// Inputs of the finite-sample distance bound for PCA+.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteSampleParams {
    pub lambda_a_1: f64,
    pub lambda_a_k: f64,
    pub lambda_b_1: f64,
    pub k: usize,
    pub m: usize,
    pub d: usize,
    pub n: usize,
}

/// Shape of the finite-sample PCA+ distance bound with its unspecified
/// constant set to 1. Unbounded; for qualitative overlays only.
pub fn finite_sample_bound_shape(p: FiniteSampleParams) -> Result<f64> {
    positive("lambda_A_1", p.lambda_a_1)?;
    positive("lambda_A_k", p.lambda_a_k)?;
    positive("lambda_B_1", p.lambda_b_1)?;
    if p.k == 0 || p.d == 0 || p.n == 0 {
        return Err(invalid("k, d and n must be positive"));
    }
    let n = p.n as f64;
    let root = |x: usize| (x as f64 / n).sqrt();
    let (la, lb) = (p.lambda_a_1, p.lambda_b_1);
    let bracket = la * root(p.k)
        + lb * root(p.m)
        + (la * lb).sqrt() * root(p.k.max(p.m))
        + (la.sqrt() + lb.sqrt() + 1.0) * root(p.d);
    Ok(bracket / p.lambda_a_k * ((p.n + p.d) as f64).ln().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        assert_eq!(fixed_aspect_error(10.0, 0.0).unwrap().dist, 0.0);
        let at = fixed_aspect_error(2.0, 4.0).unwrap();
        assert!(at.detectable && (at.dist - 1.0).abs() < 1e-15);
        let below = fixed_aspect_error(1.0, 1.44).unwrap();
        assert!(!below.detectable && below.dist == 1.0);
        assert_eq!(growing_spike_error(0.0).unwrap(), 0.0);
        assert!((growing_spike_error(1.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn alignment_bound_examples() {
        assert!((pca_plus_alignment_bound(10.0, 500.0, 1.0).unwrap() - 0.89443).abs() < 1e-5);
        assert_eq!(pca_plus_alignment_bound(10.0, 400.0, 0.25).unwrap(), 1.0);
        assert!((pca_plus_alignment_bound(10.0, 4e6, 1.0).unwrap() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn detectability_boundary() {
        assert!(bbp_detectable(10.0, 0.4));
        assert!(!bbp_detectable(1.0, 1.44));
        assert!(bbp_detectable(2f64.sqrt(), 2.0));
    }

    #[test]
    fn invalid_inputs() {
        assert!(fixed_aspect_error(0.0, 1.0).is_err());
        assert!(fixed_aspect_error(1.0, -1.0).is_err());
        assert!(growing_spike_error(-0.1).is_err());
        assert!(pca_plus_alignment_bound(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn finite_sample_shape_scaling() {
        let base = FiniteSampleParams {
            lambda_a_1: 10.0,
            lambda_a_k: 10.0,
            lambda_b_1: 500.0,
            k: 1,
            m: 1,
            d: 800,
            n: 2000,
        };
        let b1 = finite_sample_bound_shape(base).unwrap();
        let b2 = finite_sample_bound_shape(FiniteSampleParams { n: 4000, ..base }).unwrap();
        let expect = b1 / 2f64.sqrt() * (4800f64.ln() / 2800f64.ln()).sqrt();
        assert!((b2 - expect).abs() < 1e-12 * expect);
        let b3 = finite_sample_bound_shape(FiniteSampleParams {
            lambda_b_1: 2000.0,
            ..base
        })
        .unwrap();
        assert!(b3 > b1);
    }
}

//! Exact moments of a quadratic form `X^T A X` with `X = theta + eps`.

use crate::error::{Error, Result};
use crate::moments::NoiseMoments;
use crate::numeric::compensated_sum;
use crate::profile::MeanProfile;
use crate::quadform::QuadEstimator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadMoments {
    pub mean: f64,
    pub var: f64,
}

/// Whether the third-moment coupling `sum_i a_ii (A theta)_i` vanishes for
/// every `theta`: constant diagonal and `A 1 = 0`.
fn coupling_vanishes_structurally(a: &QuadEstimator) -> bool {
    let n = a.n();
    let tol = 1e-12 * a.max_abs().max(f64::MIN_POSITIVE) * n as f64;
    let diag = a.diagonal();
    if diag.iter().any(|d| (d - diag[0]).abs() > tol) {
        return false;
    }
    a.apply(&vec![1.0; n]).iter().all(|v| v.abs() <= tol)
}

/// Mean and variance of `X^T A X`:
///
/// `E = theta^T A theta + sigma^2 tr A` and
/// `Var = 4 sigma^2 ||A theta||^2 + sigma^4 (2 tr A^2 + (kappa4 - 3) sum a_ii^2)`.
///
/// The skewness contribution is not modelled, so either the noise must have
/// a zero third moment or `A` must have a constant diagonal with `A 1 = 0`.
pub fn quad_moments(
    a: &QuadEstimator,
    theta: &MeanProfile,
    noise: &NoiseMoments,
) -> Result<QuadMoments> {
    if a.n() != theta.n() {
        return Err(Error::input(format!(
            "matrix is {0}x{0} but theta has length {1}",
            a.n(),
            theta.n()
        )));
    }
    if !noise.third_moment_zero() && !coupling_vanishes_structurally(a) {
        return Err(Error::domain(
            "exact variance needs a zero third noise moment, or a matrix with constant \
             diagonal and zero row sums",
        ));
    }
    let s2 = noise.sigma2();
    let th = theta.values();
    let a_theta = a.apply(th);
    let mean = compensated_sum(a_theta.iter().zip(th).map(|(x, y)| x * y)) + s2 * a.trace();
    let diag_sq = compensated_sum(a.diagonal().iter().map(|d| d * d));
    let var = 4.0 * s2 * compensated_sum(a_theta.iter().map(|v| v * v))
        + s2 * s2 * (2.0 * a.trace_of_square() + (noise.kappa4() - 3.0) * diag_sq);
    Ok(QuadMoments { mean, var })
}

/// Scale-free risk `n (Var + bias^2) / sigma^4` of `X^T A X`.
pub fn quad_risk(a: &QuadEstimator, theta: &MeanProfile, noise: &NoiseMoments) -> Result<f64> {
    let m = quad_moments(a, theta, noise)?;
    let s2 = noise.sigma2();
    let bias = m.mean - s2;
    Ok(theta.n() as f64 * (m.var + bias * bias) / (s2 * s2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_flat_is_kappa_plus_four() {
        let g = NoiseMoments::gaussian(1.0);
        let theta = MeanProfile::constant(50, 0.0).unwrap();
        let a = QuadEstimator::eve(50, 2).unwrap();
        assert!((quad_risk(&a, &theta, &g).unwrap() - 7.0).abs() < 1e-10);
    }

    #[test]
    fn scaled_identity_is_oracle_floor() {
        // (1/n) sum eps_i^2 once the mean is removed.
        let n = 40;
        let noise = NoiseMoments::new(2.0, 6.0, true).unwrap();
        let theta = MeanProfile::constant(n, 0.0).unwrap();
        let a = QuadEstimator::scaled_identity(n, 1.0 / n as f64).unwrap();
        assert!((quad_risk(&a, &theta, &noise).unwrap() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn skewed_noise_needs_structure() {
        let n = 30;
        let skewed = NoiseMoments::new(1.0, 9.0, false).unwrap();
        let theta = MeanProfile::alternating_blocks(n, 10, 1.0).unwrap();
        assert!(quad_risk(&QuadEstimator::eve(n, 3).unwrap(), &theta, &skewed).is_ok());
        assert!(quad_risk(&QuadEstimator::rice(n).unwrap(), &theta, &skewed).is_err());
    }
}

//! Exact first and second moments of the lag statistics.

use crate::error::{Error, Result};
use crate::moments::NoiseMoments;
use crate::profile::{Boundary, MeanProfile};

/// Mean, variance and (optionally) covariance with a second lag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagMoments {
    pub mean: f64,
    pub var: f64,
    pub cov: Option<f64>,
}

fn check_cov_lag(k: usize, h: Option<usize>, half: usize) -> Result<()> {
    if let Some(h) = h {
        if !(k < h && 2 * h <= half) {
            return Err(Error::domain(format!(
                "covariance needs k < h <= L(theta)/2, got k = {k}, h = {h}, L(theta) = {half}"
            )));
        }
    }
    Ok(())
}

/// `E T_k = 2n sigma^2 + k W(theta)`, valid for `1 <= k <= L(theta)`.
pub fn tk_mean(theta: &MeanProfile, noise: &NoiseMoments, k: usize) -> Result<f64> {
    let l = theta.min_segment_len();
    if k == 0 || k > l {
        return Err(Error::domain(format!(
            "E T_k needs 1 <= k <= L(theta) = {l}, got k = {k}"
        )));
    }
    Ok(2.0 * theta.n() as f64 * noise.sigma2() + k as f64 * theta.w())
}

/// Moments of `T_k` (and `Cov(T_k, T_h)` when `h` is given); requires
/// `k <= L(theta)/2`.
pub fn tk_moments(
    theta: &MeanProfile,
    noise: &NoiseMoments,
    k: usize,
    h: Option<usize>,
) -> Result<LagMoments> {
    let l = theta.min_segment_len();
    if k == 0 || 2 * k > l {
        return Err(Error::domain(format!(
            "Var T_k needs 1 <= k <= L(theta)/2 with L(theta) = {l}, got k = {k}"
        )));
    }
    check_cov_lag(k, h, l)?;
    let n = theta.n() as f64;
    let (s2, kap, w) = (noise.sigma2(), noise.kappa4(), theta.w());
    let kf = k as f64;
    Ok(LagMoments {
        mean: tk_mean(theta, noise, k)?,
        var: 4.0 * n * kap * s2 * s2 + 8.0 * kf * s2 * w,
        cov: h.map(|_| 4.0 * n * (kap - 1.0) * s2 * s2 + 8.0 * kf * s2 * w),
    })
}

fn require_classical(theta: &MeanProfile) -> Result<()> {
    if theta.boundary() != Boundary::Classical {
        return Err(Error::domain(
            "moments of S_k are stated for classical profiles (index n is a change point)",
        ));
    }
    Ok(())
}

/// `E S_k = 2n sigma^2 + k (V(theta) - 2 sigma^2)`, valid for `1 <= k <= L(theta)`
/// on a classical profile.
pub fn sk_mean(theta: &MeanProfile, noise: &NoiseMoments, k: usize) -> Result<f64> {
    require_classical(theta)?;
    let l = theta.min_segment_len();
    if k == 0 || k > l {
        return Err(Error::domain(format!(
            "E S_k needs 1 <= k <= L(theta) = {l}, got k = {k}"
        )));
    }
    let s2 = noise.sigma2();
    Ok(2.0 * theta.n() as f64 * s2 + k as f64 * (theta.v() - 2.0 * s2))
}

/// Moments of `S_k`; requires a classical profile, `k <= L(theta)/2` and
/// symmetric third moment.
pub fn sk_moments(
    theta: &MeanProfile,
    noise: &NoiseMoments,
    k: usize,
    h: Option<usize>,
) -> Result<LagMoments> {
    require_classical(theta)?;
    if !noise.third_moment_zero() {
        return Err(Error::domain(
            "Var S_k is only available when the third noise moment is zero",
        ));
    }
    let l = theta.min_segment_len();
    if k == 0 || 2 * k > l {
        return Err(Error::domain(format!(
            "Var S_k needs 1 <= k <= L(theta)/2 with L(theta) = {l}, got k = {k}"
        )));
    }
    check_cov_lag(k, h, l)?;
    let n = theta.n() as f64;
    let (s2, kap, v) = (noise.sigma2(), noise.kappa4(), theta.v());
    let s4 = s2 * s2;
    let kf = k as f64;
    let var = 2.0 * (n - kf) * (kap + 1.0) * s4
        + 2.0 * (n - 2.0 * kf) * (kap - 1.0) * s4
        + 8.0 * kf * s2 * v;
    let cov =
        h.map(|h| (4.0 * n - 4.0 * h as f64 - 2.0 * kf) * (kap - 1.0) * s4 + 8.0 * kf * s2 * v);
    Ok(LagMoments {
        mean: sk_mean(theta, noise, k)?,
        var,
        cov,
    })
}

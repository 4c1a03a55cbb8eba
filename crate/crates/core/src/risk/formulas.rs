//! Closed-form risks of the OLS estimators on circular and linear lag
//! statistics. All values are scale free: `r = (n / sigma^4) E(sigma2_hat - sigma^2)^2`.

use crate::error::{Error, Result};
use crate::moments::NoiseMoments;
use crate::regression::ols_intercept_weights;

/// Risk value split into its additive parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskComponents {
    /// `kappa4 - 1`, the risk of the oracle that knows the mean.
    pub kappa_term: f64,
    /// `(4K + 2) / (K(K - 1))`, the price of estimating the intercept.
    pub design_term: f64,
    /// Contribution of the mean through `W/(n sigma^2)` or `V/(n sigma^2)`.
    pub mean_term: f64,
    /// Order `1/n` correction; nonzero only for the linear-lag estimator.
    /// Includes `(kappa4 - 3) / n` times the edge coefficient from
    /// [`ms_edge_kurtosis_coefficient`].
    pub sample_size_term: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskReport {
    pub risk: f64,
    pub components: RiskComponents,
    /// `false` when `risk` is an upper bound rather than the exact value.
    pub exact: bool,
}

impl RiskReport {
    fn from_components(components: RiskComponents, exact: bool) -> Self {
        let c = components;
        Self {
            risk: c.kappa_term + c.design_term + c.mean_term + c.sample_size_term,
            components,
            exact,
        }
    }
}

/// `(4K + 2) / (K(K - 1))`, also equal to `||d||^2` for the OLS weights.
pub fn design_term(k: usize) -> f64 {
    let kf = k as f64;
    (4.0 * kf + 2.0) / (kf * (kf - 1.0))
}

/// `(K+1)(K+2)(2K+1) / (15 K (K-1))`.
pub fn exact_mean_coefficient(k: usize) -> f64 {
    let kf = k as f64;
    (kf + 1.0) * (kf + 2.0) * (2.0 * kf + 1.0) / (15.0 * kf * (kf - 1.0))
}

/// `(K+1)(K+2)^2 / (3 K (K-1))`.
pub fn bound_mean_coefficient(k: usize) -> f64 {
    let kf = k as f64;
    (kf + 1.0) * (kf + 2.0).powi(2) / (3.0 * kf * (kf - 1.0))
}

fn check_common(k: usize, n: usize, ratio: f64, name: &str) -> Result<()> {
    if k < 2 {
        return Err(Error::domain(format!("K must be >= 2, got {k}")));
    }
    if k >= n {
        return Err(Error::domain(format!(
            "K = {k} must be smaller than n = {n}"
        )));
    }
    if !(ratio >= 0.0 && ratio.is_finite()) {
        return Err(Error::domain(format!(
            "{name} must be finite and >= 0, got {ratio}"
        )));
    }
    Ok(())
}

/// Risk of the circular OLS estimator with `K` lags at `Wratio = W/(n sigma^2)`.
///
/// `exact = true` gives the exact risk, valid when `K <= L(theta)/2`;
/// `exact = false` gives the upper bound valid for `K <= L(theta)`.
pub fn ols_risk(
    k: usize,
    n: usize,
    noise: &NoiseMoments,
    w_ratio: f64,
    exact: bool,
) -> Result<RiskReport> {
    check_common(k, n, w_ratio, "Wratio")?;
    let mean_term = if exact {
        2.0 * w_ratio * exact_mean_coefficient(k)
    } else {
        w_ratio * bound_mean_coefficient(k)
    };
    Ok(RiskReport::from_components(
        RiskComponents {
            kappa_term: noise.kappa4() - 1.0,
            design_term: design_term(k),
            mean_term,
            sample_size_term: 0.0,
        },
        exact,
    ))
}

/// Coefficient of the `1/n` term in the linear-lag risk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MsSampleSizeTerm {
    /// `2(K-7)(K+1)(K+2) / (15 K (K-1))`; agrees with the exact variance of
    /// the quadratic form.
    #[default]
    Derived,
    /// `2(K-7)(K+1)(K+2) / (K (K-1))`, fifteen times larger.
    Unscaled,
}

impl MsSampleSizeTerm {
    pub fn coefficient(self, k: usize) -> f64 {
        let kf = k as f64;
        let base = 2.0 * (kf - 7.0) * (kf + 1.0) * (kf + 2.0) / (kf * (kf - 1.0));
        match self {
            MsSampleSizeTerm::Derived => base / 15.0,
            MsSampleSizeTerm::Unscaled => base,
        }
    }
}

/// The linear-lag matrix has a non-constant diagonal near both ends, so its
/// `(kappa4 - 3) sum a_ii^2` term exceeds the circular one. The excess, in
/// risk units and times `n`, is `sum_{i<=K} (1 + D_{i-1})^2 / 2 - 2K` with
/// `D_j = d_1 + ... + d_j`. Needs `n >= 2K`.
pub fn ms_edge_kurtosis_coefficient(k: usize) -> Result<f64> {
    let d = ols_intercept_weights(k)?;
    let mut partial = 0.0;
    let mut acc = 0.0;
    for dk in &d {
        acc += (1.0 + partial) * (1.0 + partial);
        partial += dk;
    }
    Ok(0.5 * acc - 2.0 * k as f64)
}

/// Risk of the OLS estimator on linear lag statistics `S_k` at
/// `Vratio = V/(n sigma^2)`, for a classical profile with symmetric noise.
///
/// `exact = true` is valid for `K <= L(theta)/2`; otherwise the bound for
/// `K <= L(theta)`, `K <= n/2` is returned.
pub fn ms_risk(
    k: usize,
    n: usize,
    noise: &NoiseMoments,
    v_ratio: f64,
    exact: bool,
    term: MsSampleSizeTerm,
) -> Result<RiskReport> {
    check_common(k, n, v_ratio, "Vratio")?;
    if !noise.third_moment_zero() {
        return Err(Error::domain(
            "the linear-lag risk requires a zero third noise moment",
        ));
    }
    if !exact && 2 * k > n {
        return Err(Error::domain(format!(
            "the bound needs K <= n/2, got K = {k}, n = {n}"
        )));
    }
    let mean_term = if exact {
        2.0 * v_ratio * exact_mean_coefficient(k)
    } else {
        v_ratio * bound_mean_coefficient(k)
    };
    Ok(RiskReport::from_components(
        RiskComponents {
            kappa_term: noise.kappa4() - 1.0,
            design_term: design_term(k),
            mean_term,
            sample_size_term: (term.coefficient(k)
                + (noise.kappa4() - 3.0) * ms_edge_kurtosis_coefficient(k)?)
                / n as f64,
        },
        exact,
    ))
}

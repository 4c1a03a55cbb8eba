//! Noise variance estimators for piecewise-constant signals.
//!
//! The regression estimators (`eve_ols`, `ms_ols`, `gls`) are fixed linear
//! combinations of the rescaled lag statistics `Y_k`; their weights are
//! computed in closed form (OLS) or from a small dense solve (GLS). The
//! baselines (`mad`, `dk`, `rice`, `sample_sd`) and the `oracle` that knows
//! the true mean are provided for comparison.

mod tune;

use std::fmt;
use std::sync::Arc;

pub use tune::{select_k, tune_k, tune_k_scores, TuneOutcome};

use crate::error::{Error, Result};
use crate::lagstats::{lag_stat_s, rescaled_stats};
use crate::numeric::{compensated_sum, median};
use crate::profile::MeanProfile;
use crate::regression::{gls_intercept_weights, ols_intercept_weights};
use crate::series::CircularSeries;

/// Normal-consistency constant of the MAD, as used in practice.
pub const MAD_SCALE: f64 = 1.4826;
/// Constant of the first-difference MAD; the numerator is deliberately 1.48,
/// not 1.4826.
pub const DK_NUMERATOR: f64 = 1.48;

/// Which estimator to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorKind {
    /// OLS intercept of circular `Y_k` on `(1, k)`, `k = 1..K`.
    Eve {
        k: usize,
    },
    /// `Eve` with `K` chosen by [`tune_k`] over `k_min..=k_max`.
    EveTuned {
        k_min: usize,
        k_max: usize,
    },
    /// OLS intercept using linear `S_k` in place of `T_k`.
    Ms {
        k: usize,
    },
    /// GLS intercept with covariance shape `I + 2w H`.
    Gls {
        l: usize,
        w: f64,
    },
    Mad,
    Dk,
    Rice,
    Oracle(Arc<MeanProfile>),
    SampleSd,
}

impl EstimatorKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EstimatorKind::Eve { k } | EstimatorKind::Ms { k } if k < 2 => {
                Err(Error::domain(format!("K must be >= 2, got {k}")))
            }
            EstimatorKind::EveTuned { k_min, k_max } if k_min < 3 || k_min >= k_max => Err(
                Error::domain(format!("tuning range {k_min}..={k_max} is invalid")),
            ),
            EstimatorKind::Gls { l, w } if l < 2 || w.is_nan() || w < 0.0 => Err(Error::domain(
                format!("GLS needs L >= 2 and w >= 0, got L={l}, w={w}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, x: &CircularSeries) -> Result<VarianceEstimate> {
        let (sigma2_hat, k_used) = match self {
            EstimatorKind::Eve { k } => (eve_ols_value(x, *k)?, Some(*k)),
            EstimatorKind::EveTuned { k_min, k_max } => {
                let k = tune_k(x, *k_min, *k_max)?;
                (eve_ols_value(x, k)?, Some(k))
            }
            EstimatorKind::Ms { k } => (ms_ols_value(x, *k)?, Some(*k)),
            EstimatorKind::Gls { l, w } => (gls_value(x, *l, *w)?, Some(*l)),
            EstimatorKind::Mad => (mad_sigma(x).powi(2), None),
            EstimatorKind::Dk => (dk_sigma(x).powi(2), None),
            EstimatorKind::Rice => (rice_value(x), None),
            EstimatorKind::Oracle(theta) => (oracle_value(x, theta)?, None),
            EstimatorKind::SampleSd => (sample_variance(x), None),
        };
        Ok(VarianceEstimate::new(sigma2_hat, self.clone(), k_used))
    }

    /// Short label used in tables, e.g. `EVE(K=10)`.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorKind::Eve { k } => write!(f, "EVE(K={k})"),
            EstimatorKind::EveTuned { .. } => write!(f, "EVE"),
            EstimatorKind::Ms { k } => write!(f, "MS(K={k})"),
            EstimatorKind::Gls { l, w } => write!(f, "GLS(L={l},w={w})"),
            EstimatorKind::Mad => write!(f, "MAD"),
            EstimatorKind::Dk => write!(f, "DK"),
            EstimatorKind::Rice => write!(f, "Rice"),
            EstimatorKind::Oracle(_) => write!(f, "Oracle"),
            EstimatorKind::SampleSd => write!(f, "SD"),
        }
    }
}

/// A variance estimate and its square root.
///
/// `sigma2_hat` is kept as computed, even when negative, so averages over
/// replicates stay unbiased; `sigma_hat` clamps at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceEstimate {
    pub sigma2_hat: f64,
    pub sigma_hat: f64,
    pub kind: EstimatorKind,
    pub k_used: Option<usize>,
}

impl VarianceEstimate {
    fn new(sigma2_hat: f64, kind: EstimatorKind, k_used: Option<usize>) -> Self {
        Self {
            sigma2_hat,
            sigma_hat: sigma2_hat.max(0.0).sqrt(),
            kind,
            k_used,
        }
    }
}

fn check_k(x: &CircularSeries, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::domain(format!(
            "K = {k} leaves the slope unidentifiable; K must be >= 2"
        )));
    }
    if k >= x.len() {
        return Err(Error::domain(format!(
            "K = {k} must be below n = {}",
            x.len()
        )));
    }
    Ok(())
}

fn weighted(weights: &[f64], y: &[f64]) -> f64 {
    compensated_sum(weights.iter().zip(y).map(|(w, v)| w * v))
}

fn eve_ols_value(x: &CircularSeries, k: usize) -> Result<f64> {
    check_k(x, k)?;
    let y = rescaled_stats(x, k, true)?;
    Ok(weighted(&ols_intercept_weights(k)?, &y))
}

fn ms_ols_value(x: &CircularSeries, k: usize) -> Result<f64> {
    check_k(x, k)?;
    let y = rescaled_stats(x, k, false)?;
    Ok(weighted(&ols_intercept_weights(k)?, &y))
}

fn gls_value(x: &CircularSeries, l: usize, w: f64) -> Result<f64> {
    check_k(x, l)?;
    let d = gls_intercept_weights(l, w)?;
    let y = rescaled_stats(x, l, true)?;
    Ok(weighted(&d, &y))
}

fn mad_sigma(x: &CircularSeries) -> f64 {
    let v = x.values();
    let m = median(v).expect("non-empty series");
    let dev: Vec<f64> = v.iter().map(|xi| (xi - m).abs()).collect();
    MAD_SCALE * median(&dev).expect("non-empty series")
}

fn dk_sigma(x: &CircularSeries) -> f64 {
    let diffs: Vec<f64> = x.values().windows(2).map(|p| (p[1] - p[0]).abs()).collect();
    DK_NUMERATOR / std::f64::consts::SQRT_2 * median(&diffs).expect("n >= 2")
}

fn rice_value(x: &CircularSeries) -> f64 {
    // S_1 has n - 1 terms but is divided by 2n.
    lag_stat_s(x, 1).expect("n >= 4") / (2.0 * x.len() as f64)
}

fn oracle_value(x: &CircularSeries, theta: &MeanProfile) -> Result<f64> {
    if theta.n() != x.len() {
        return Err(Error::input(format!(
            "mean profile has length {}, series has {}",
            theta.n(),
            x.len()
        )));
    }
    let ss = compensated_sum(
        x.values()
            .iter()
            .zip(theta.values())
            .map(|(a, b)| (a - b).powi(2)),
    );
    Ok(ss / x.len() as f64)
}

fn sample_variance(x: &CircularSeries) -> f64 {
    let v = x.values();
    let n = v.len() as f64;
    let mean = compensated_sum(v.iter().copied()) / n;
    compensated_sum(v.iter().map(|xi| (xi - mean).powi(2))) / (n - 1.0)
}

/// Equivariant variance estimator: OLS intercept of circular `Y_1..Y_K`.
pub fn eve_ols(x: &CircularSeries, k: usize) -> Result<VarianceEstimate> {
    EstimatorKind::Eve { k }.evaluate(x)
}

/// Regression estimator on the linear lag statistics `S_k`.
pub fn ms_ols(x: &CircularSeries, k: usize) -> Result<VarianceEstimate> {
    EstimatorKind::Ms { k }.evaluate(x)
}

pub fn gls(x: &CircularSeries, l: usize, w: f64) -> Result<VarianceEstimate> {
    let kind = EstimatorKind::Gls { l, w };
    kind.validate()?;
    kind.evaluate(x)
}

/// `1.4826 * med(|X - med(X)|)`.
pub fn mad(x: &CircularSeries) -> VarianceEstimate {
    EstimatorKind::Mad.evaluate(x).expect("infallible")
}

/// `(1.48 / sqrt 2) * med(|X_{i+1} - X_i|)` over the `n - 1` linear differences.
pub fn dk(x: &CircularSeries) -> VarianceEstimate {
    EstimatorKind::Dk.evaluate(x).expect("infallible")
}

/// First-difference estimator `S_1 / (2n)`.
pub fn rice(x: &CircularSeries) -> VarianceEstimate {
    EstimatorKind::Rice.evaluate(x).expect("infallible")
}

/// Mean squared residual against the true mean.
pub fn oracle(x: &CircularSeries, theta: &MeanProfile) -> Result<VarianceEstimate> {
    EstimatorKind::Oracle(Arc::new(theta.clone())).evaluate(x)
}

pub fn sample_sd(x: &CircularSeries) -> VarianceEstimate {
    EstimatorKind::SampleSd.evaluate(x).expect("infallible")
}

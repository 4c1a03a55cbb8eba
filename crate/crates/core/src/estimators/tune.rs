//! Data-driven choice of the number of lags `K`.
//!
//! For each candidate `K` a line is fitted to `Y_1..Y_K` and used to predict
//! `Y_{K+1}`. The score `SC(K) = |Y_hat_{K+1} - Y_{K+1}| / sigma_e` with
//! `sigma_e = sqrt(RSS / (K - 2))` spikes at the last lag before the mean
//! structure bends the `Y_k` away from a straight line.

use crate::error::{Error, Result};
use crate::lagstats::rescaled_stats;
use crate::regression::fit_line;
use crate::series::CircularSeries;

/// Absolute threshold, relative to `max |Y_k|`, below which a residual scale
/// or a prediction error is treated as zero.
const DEGENERATE_TOL: f64 = 1e-12;

/// Score of each candidate `K` and the selected value.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneOutcome {
    pub k: usize,
    pub scores: Vec<(usize, f64)>,
}

fn check_range(k_min: usize, k_max: usize) -> Result<()> {
    if k_min < 3 {
        return Err(Error::domain(format!(
            "K_min = {k_min}: the residual scale needs K - 2 >= 1 degrees of freedom"
        )));
    }
    if k_min >= k_max {
        return Err(Error::domain(format!(
            "need K_min < K_max, got {k_min} >= {k_max}"
        )));
    }
    Ok(())
}

/// Scores `K_min..=K_max` on precomputed `Y_1..Y_m` (`m >= K_max + 1`) and
/// returns the maximiser, smallest `K` on ties.
pub fn select_k(y: &[f64], k_min: usize, k_max: usize) -> Result<TuneOutcome> {
    check_range(k_min, k_max)?;
    if y.len() < k_max + 1 {
        return Err(Error::domain(format!(
            "need Y_1..Y_{} to score K up to {k_max}, got {} values",
            k_max + 1,
            y.len()
        )));
    }
    let scale = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol = DEGENERATE_TOL * scale.max(f64::MIN_POSITIVE);

    let mut scores = Vec::with_capacity(k_max - k_min + 1);
    let mut best: Option<(usize, f64)> = None;
    for k in k_min..=k_max {
        let fit = fit_line(&y[..k])?;
        let err = (fit.predict((k + 1) as f64) - y[k]).abs();
        let sigma_e = (fit.rss / (k - 2) as f64).sqrt();
        let score = if sigma_e <= tol {
            if err <= tol {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            err / sigma_e
        };
        scores.push((k, score));
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((k, score));
        }
    }
    let (k, _) = best.expect("non-empty candidate range");
    Ok(TuneOutcome { k, scores })
}

/// Selects `K` in `K_min..=K_max` from the circular statistics of `x`.
pub fn tune_k_scores(x: &CircularSeries, k_min: usize, k_max: usize) -> Result<TuneOutcome> {
    check_range(k_min, k_max)?;
    if k_max + 2 > x.len() {
        return Err(Error::domain(format!(
            "K_max = {k_max} requires a series of length >= {}, got {}",
            k_max + 2,
            x.len()
        )));
    }
    let y = rescaled_stats(x, k_max + 1, true)?;
    select_k(&y, k_min, k_max)
}

pub fn tune_k(x: &CircularSeries, k_min: usize, k_max: usize) -> Result<usize> {
    tune_k_scores(x, k_min, k_max).map(|o| o.k)
}

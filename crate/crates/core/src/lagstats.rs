//! Lag-k difference statistics `T_k` (circular) and `S_k` (linear).

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::series::CircularSeries;

fn check_lag(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::domain(format!("lag {k} outside 1..={}", n - 1)));
    }
    Ok(())
}

/// `T_k = sum_{i=1}^n (X_i - X_{i+k})^2` with circular indexing.
pub fn lag_stat_t(x: &CircularSeries, k: usize) -> Result<f64> {
    let n = x.len();
    check_lag(n, k)?;
    let v = x.values();
    Ok(compensated_sum(
        (0..n).map(|i| (v[i] - v[(i + k) % n]).powi(2)),
    ))
}

/// `S_k = sum_{i=1}^{n-k} (X_i - X_{i+k})^2`.
pub fn lag_stat_s(x: &CircularSeries, k: usize) -> Result<f64> {
    let n = x.len();
    check_lag(n, k)?;
    let v = x.values();
    Ok(compensated_sum(
        (0..n - k).map(|i| (v[i] - v[i + k]).powi(2)),
    ))
}

/// `(Y_1, ..., Y_K)` with `Y_k = T_k / (2n)` when `circular`, else `S_k / (2n)`.
pub fn rescaled_stats(x: &CircularSeries, max_lag: usize, circular: bool) -> Result<Vec<f64>> {
    let n = x.len();
    check_lag(n, max_lag)?;
    let denom = 2.0 * n as f64;
    (1..=max_lag)
        .map(|k| {
            let s = if circular {
                lag_stat_t(x, k)?
            } else {
                lag_stat_s(x, k)?
            };
            Ok(s / denom)
        })
        .collect()
}

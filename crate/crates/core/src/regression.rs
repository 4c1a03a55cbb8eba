//! Least-squares fits of `Y_k = alpha + k beta + e_k`, `k = 1..K`.
//!
//! The OLS weights have closed forms, so intercept and slope estimators are
//! fixed linear combinations of the `Y_k`. The GLS weights use the covariance
//! shape `I + 2w H` with `H_{ij} = min(i, j)`; the compound-symmetric
//! `(kappa4 - 1) 1 1^T` part of the covariance does not change the GLS
//! intercept and is left out.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

fn check_design(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::domain(format!(
            "a line through Y_1..Y_K needs K >= 2, got K = {k}"
        )));
    }
    Ok(())
}

/// OLS intercept weights `d_k = 2((2K+1) - 3k) / (K(K-1))`, i.e. the first row
/// of `(Z^T Z)^{-1} Z^T`.
pub fn ols_intercept_weights(k_max: usize) -> Result<Vec<f64>> {
    check_design(k_max)?;
    let kf = k_max as f64;
    let scale = 2.0 / (kf * (kf - 1.0));
    Ok((1..=k_max)
        .map(|k| scale * ((2.0 * kf + 1.0) - 3.0 * k as f64))
        .collect())
}

/// OLS slope weights, the second row of `(Z^T Z)^{-1} Z^T`:
/// `b_k = 6(2k - K - 1) / (K(K-1)(K+1))`.
pub fn ols_slope_weights(k_max: usize) -> Result<Vec<f64>> {
    check_design(k_max)?;
    let kf = k_max as f64;
    let scale = 6.0 / (kf * (kf - 1.0) * (kf + 1.0));
    Ok((1..=k_max)
        .map(|k| scale * (2.0 * k as f64 - kf - 1.0))
        .collect())
}

/// Result of fitting a line to `Y_1..Y_K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub rss: f64,
}

impl LineFit {
    pub fn predict(&self, k: f64) -> f64 {
        self.intercept + self.slope * k
    }
}

/// OLS line through the points `(k, y[k-1])`, `k = 1..y.len()`.
pub fn fit_line(y: &[f64]) -> Result<LineFit> {
    let d = ols_intercept_weights(y.len())?;
    let b = ols_slope_weights(y.len())?;
    let intercept: f64 = d.iter().zip(y).map(|(w, v)| w * v).sum();
    let slope: f64 = b.iter().zip(y).map(|(w, v)| w * v).sum();
    let rss = y
        .iter()
        .enumerate()
        .map(|(i, v)| (v - intercept - slope * (i + 1) as f64).powi(2))
        .sum();
    Ok(LineFit {
        intercept,
        slope,
        rss,
    })
}

/// `H_L` with entries `min(i, j)`, equal to `U_L^T U_L` for the upper
/// triangular all-ones `U_L`.
pub fn min_matrix(l: usize) -> DMatrix<f64> {
    DMatrix::from_fn(l, l, |i, j| (i.min(j) + 1) as f64)
}

pub(crate) fn design(l: usize) -> DMatrix<f64> {
    DMatrix::from_fn(l, 2, |i, j| if j == 0 { 1.0 } else { (i + 1) as f64 })
}

/// GLS intercept weights for `Y_1..Y_L` under covariance shape
/// `I_L + 2w H_L`.
pub fn gls_intercept_weights(l: usize, w: f64) -> Result<Vec<f64>> {
    check_design(l)?;
    if !(w >= 0.0 && w.is_finite()) {
        return Err(Error::domain(format!("w must be finite and >= 0, got {w}")));
    }
    let m = DMatrix::<f64>::identity(l, l) + min_matrix(l) * (2.0 * w);
    let z = design(l);
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::domain("GLS covariance is not positive definite"))?;
    let minv_z = chol.solve(&z);
    let normal = z.transpose() * &minv_z;
    let normal_inv = normal
        .try_inverse()
        .ok_or_else(|| Error::domain("GLS normal equations are singular"))?;
    let e1 = DVector::from_column_slice(&[1.0, 0.0]);
    let d = minv_z * (normal_inv * e1);
    Ok(d.iter().copied().collect())
}

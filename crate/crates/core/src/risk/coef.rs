//! Equivariant unbiased estimators `sum_k c_k Y_k` and their risks.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::moments::NoiseMoments;
use crate::profile::MeanProfile;

/// Tolerance for the two linear constraints defining `Q_L`.
pub const QL_TOL: f64 = 1e-10;

/// Whether `sum c_k = 1` and `sum k c_k = 0` hold within [`QL_TOL`].
pub fn is_in_ql(c: &[f64]) -> bool {
    let (s, m) = constraint_residuals(c);
    c.len() >= 2 && (s - 1.0).abs() <= QL_TOL && m.abs() <= QL_TOL
}

fn constraint_residuals(c: &[f64]) -> (f64, f64) {
    let s = c.iter().sum();
    let m = c.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
    (s, m)
}

/// Weights `c_1..c_L` of an unbiased equivariant estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefVector {
    c: Vec<f64>,
}

impl CoefVector {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("coefficients must be finite"));
        }
        if !is_in_ql(&c) {
            let (s, m) = constraint_residuals(&c);
            return Err(Error::domain(format!(
                "coefficients violate sum c = 1 / sum k c = 0 (sum = {s}, moment = {m})"
            )));
        }
        Ok(Self { c })
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.c
    }

    pub fn squared_norm(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum()
    }
}

/// Scale-free risk `kappa4 - 1 + c^T c - (W/(n sigma^2)) c^T G c` with
/// `G_kl = |k - l| + (1/W) sum_i (theta_i - theta_{i+k+l})^2`.
///
/// Requires `L <= L(theta)`. When `W = 0` the mean term is dropped.
pub fn risk_of_c(c: &CoefVector, theta: &MeanProfile, noise: &NoiseMoments) -> Result<f64> {
    let l = c.len();
    let n = theta.n();
    let lt = theta.min_segment_len();
    if l > lt || l >= n {
        return Err(Error::domain(format!(
            "need L <= L(theta) and L < n, got L = {l}, L(theta) = {lt}, n = {n}"
        )));
    }
    let cs = c.as_slice();
    let base = noise.kappa4() - 1.0 + c.squared_norm();
    let w = theta.w();
    if w == 0.0 {
        return Ok(base);
    }
    // (W/(n s2)) G_kl = (|k-l| W + lagvar(k+l)) / (n s2)
    let lagvar: Vec<f64> = (0..=2 * l).map(|m| theta.lag_variation(m)).collect();
    let mut quad = 0.0;
    for k in 1..=l {
        for j in 1..=l {
            let g = k.abs_diff(j) as f64 * w + lagvar[k + j];
            quad += cs[k - 1] * cs[j - 1] * g;
        }
    }
    Ok(base - quad / (n as f64 * noise.sigma2()))
}

/// Minimiser of `c^T (I - w G) c` over `Q_L` with `G_kl = 2 max(k, l)`, the
/// worst-case mean structure on profiles whose segments are at least `2L`
/// long. Solved from the KKT system of the two equality constraints.
pub fn optimal_c(l: usize, w_ratio: f64) -> Result<CoefVector> {
    if l < 2 {
        return Err(Error::domain(format!("L must be >= 2, got {l}")));
    }
    if !(w_ratio >= 0.0 && w_ratio.is_finite()) {
        return Err(Error::domain(format!(
            "Wratio must be finite and >= 0, got {w_ratio}"
        )));
    }
    let dim = l + 2;
    let mut kkt = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..l {
        for j in 0..l {
            let g = 2.0 * (i.max(j) + 1) as f64;
            let id = if i == j { 1.0 } else { 0.0 };
            kkt[(i, j)] = 2.0 * (id - w_ratio * g);
        }
        kkt[(i, l)] = 1.0;
        kkt[(l, i)] = 1.0;
        kkt[(i, l + 1)] = (i + 1) as f64;
        kkt[(l + 1, i)] = (i + 1) as f64;
    }
    let mut rhs = DVector::<f64>::zeros(dim);
    rhs[l] = 1.0;
    let sol = kkt
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::domain("KKT system is singular"))?;
    CoefVector::new(sol.iter().take(l).copied().collect())
}

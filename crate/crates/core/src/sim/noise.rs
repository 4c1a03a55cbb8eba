//! Noise distributions with mean zero and unit variance.

use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::moments::NoiseMoments;
use crate::series::CircularSeries;

/// Residuals standardised to mean zero and (population) variance one, used
/// for resampling.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalResiduals {
    values: Vec<f64>,
}

impl EmpiricalResiduals {
    pub fn from_values(raw: &[f64]) -> Result<Self> {
        if raw.len() < 2 || raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("residuals need at least two finite values"));
        }
        let n = raw.len() as f64;
        let mean = raw.iter().sum::<f64>() / n;
        let var = raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        if var <= 0.0 {
            return Err(Error::input(
                "residuals are constant and cannot be standardised",
            ));
        }
        let sd = var.sqrt();
        Ok(Self {
            values: raw.iter().map(|v| (v - mean) / sd).collect(),
        })
    }

    /// One-column CSV.
    pub fn from_csv_path(path: impl AsRef<Path>, has_header: bool) -> Result<Self> {
        let series = CircularSeries::from_csv_path(path, has_header)?;
        Self::from_values(series.values())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Fourth standardised moment of the resampling distribution.
    pub fn kappa4(&self) -> f64 {
        self.values.iter().map(|v| v.powi(4)).sum::<f64>() / self.values.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseKind {
    Gaussian,
    /// `sqrt(2/3) t_6`.
    ScaledT6,
    /// `Exp(1) - 1`.
    ExpShifted,
    /// Resampling with replacement from standardised residuals.
    Empirical(Arc<EmpiricalResiduals>),
}

impl NoiseKind {
    /// One-letter code used in scenario labels.
    pub fn code(&self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "G",
            NoiseKind::ScaledT6 => "T",
            NoiseKind::ExpShifted => "E",
            NoiseKind::Empirical(_) => "R",
        }
    }

    pub fn moments(&self) -> NoiseMoments {
        let (kappa4, symmetric) = match self {
            NoiseKind::Gaussian => (3.0, true),
            NoiseKind::ScaledT6 => (6.0, true),
            NoiseKind::ExpShifted => (9.0, false),
            NoiseKind::Empirical(r) => (r.kappa4().max(1.0), false),
        };
        NoiseMoments::new(1.0, kappa4, symmetric).expect("unit-variance noise")
    }
}

/// `n` i.i.d. draws.
pub fn sample_noise<R: Rng + ?Sized>(kind: &NoiseKind, n: usize, rng: &mut R) -> Vec<f64> {
    match kind {
        NoiseKind::Gaussian => (0..n).map(|_| StandardNormal.sample(rng)).collect(),
        NoiseKind::ScaledT6 => {
            let chi = ChiSquared::new(6.0).expect("valid degrees of freedom");
            let scale = (2.0f64 / 3.0).sqrt();
            (0..n)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    let c: f64 = chi.sample(rng);
                    scale * z / (c / 6.0).sqrt()
                })
                .collect()
        }
        NoiseKind::ExpShifted => (0..n)
            .map(|_| {
                let e: f64 = Exp1.sample(rng);
                e - 1.0
            })
            .collect(),
        NoiseKind::Empirical(r) => {
            let v = r.values();
            (0..n).map(|_| v[rng.random_range(0..v.len())]).collect()
        }
    }
}

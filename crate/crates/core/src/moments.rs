use crate::error::{Error, Result};

/// Second and fourth moment information of the i.i.d. noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseMoments {
    sigma2: f64,
    kappa4: f64,
    third_moment_zero: bool,
}

impl NoiseMoments {
    pub fn new(sigma2: f64, kappa4: f64, third_moment_zero: bool) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::domain(format!(
                "noise variance must be positive, got {sigma2}"
            )));
        }
        // E eps^4 >= (E eps^2)^2
        if !(kappa4 >= 1.0 && kappa4.is_finite()) {
            return Err(Error::domain(format!("kappa4 must be >= 1, got {kappa4}")));
        }
        Ok(Self {
            sigma2,
            kappa4,
            third_moment_zero,
        })
    }

    /// Standard Gaussian noise: sigma^2 = 1, kappa4 = 3, symmetric.
    pub fn gaussian(sigma2: f64) -> Self {
        Self::new(sigma2, 3.0, true).expect("valid gaussian moments")
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn kappa4(&self) -> f64 {
        self.kappa4
    }

    pub fn third_moment_zero(&self) -> bool {
        self.third_moment_zero
    }
}

//! Variance estimation for piecewise-constant means observed with i.i.d. noise.
//!
//! The estimators regress rescaled lag statistics of the circularly indexed
//! series on the lag and read off the intercept. Around them sit exact risk
//! formulas, minimax bounds, matrix-level verifiers for equivariance and
//! unbiasedness, and a reproducible Monte Carlo harness.

pub mod error;
pub mod estimators;
pub mod lagstats;
pub mod moments;
pub mod numeric;
pub mod par;
pub mod profile;
pub mod quadform;
pub mod regression;
pub mod risk;
pub mod series;
pub mod sim;
pub mod verifier;

pub use error::{Error, Result};
pub use estimators::{EstimatorKind, VarianceEstimate};
pub use moments::NoiseMoments;
pub use par::Execution;
pub use profile::{Boundary, MeanProfile, Segment};
pub use quadform::QuadEstimator;
pub use series::CircularSeries;

//! Replicate loop and summary statistics.
//!
//! Replicate `r` draws its noise from `ChaCha8Rng::seed_from_u64(seed)` on
//! stream `r`, so every replicate has its own reproducible sequence no matter
//! which thread runs it. Per-replicate outcomes are collected in order and
//! reduced sequentially, making results bit-identical across thread counts.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::numeric::compensated_sum;
use crate::par::{map_indexed, Execution};
use crate::profile::MeanProfile;
use crate::series::CircularSeries;
use crate::sim::noise::{sample_noise, NoiseKind};

#[derive(Debug, Clone)]
pub struct SimScenario {
    pub label: String,
    pub mean: Arc<MeanProfile>,
    pub noise: NoiseKind,
    pub replicates: usize,
    pub seed: u64,
}

impl SimScenario {
    pub fn n(&self) -> usize {
        self.mean.n()
    }

    /// Noise vector of replicate `r`.
    pub fn replicate_noise(&self, r: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(r as u64);
        sample_noise(&self.noise, self.n(), &mut rng)
    }

    /// Observed series of replicate `r`.
    pub fn replicate_series(&self, r: usize) -> Result<CircularSeries> {
        let eps = self.replicate_noise(r);
        CircularSeries::new(
            self.mean
                .values()
                .iter()
                .zip(eps)
                .map(|(t, e)| t + e)
                .collect(),
        )
    }
}

/// Which scale relative efficiency is computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EfficiencyScale {
    /// Mean squared error of `sigma_hat` about `sigma`.
    #[default]
    Sd,
    /// Mean squared error of `sigma2_hat` about `sigma^2`.
    Variance,
}

/// Per-estimator outcomes and their summaries.
#[derive(Debug, Clone, Serialize)]
pub struct EstimatorStats {
    pub label: String,
    /// `sigma2_hat` per replicate; `None` where the estimator failed.
    #[serde(skip)]
    pub sigma2_draws: Vec<Option<f64>>,
    #[serde(skip)]
    pub k_used: Vec<Option<usize>>,
    pub failures: usize,
    pub first_error: Option<String>,
    pub mean_sigma: f64,
    /// Sample standard deviation of `sigma_hat` across replicates; `None`
    /// with fewer than two successful replicates.
    pub se_sigma: Option<f64>,
    pub mse_sigma: f64,
    pub mean_sigma2: f64,
    pub se_sigma2: Option<f64>,
    pub mse_sigma2: f64,
}

fn sigma_of(s2: f64) -> f64 {
    s2.max(0.0).sqrt()
}

fn mean_sd_mse(values: &[f64], truth: f64) -> (f64, Option<f64>, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, None, f64::NAN);
    }
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    let sd = (n >= 2).then(|| {
        (compensated_sum(values.iter().map(|v| (v - mean).powi(2))) / (n - 1) as f64).sqrt()
    });
    let mse = compensated_sum(values.iter().map(|v| (v - truth).powi(2))) / n as f64;
    (mean, sd, mse)
}

impl EstimatorStats {
    fn summarise(
        label: String,
        draws: Vec<Option<f64>>,
        k_used: Vec<Option<usize>>,
        first_error: Option<String>,
        sigma2: f64,
    ) -> Self {
        let ok: Vec<f64> = draws.iter().flatten().copied().collect();
        let sig: Vec<f64> = ok.iter().map(|&v| sigma_of(v)).collect();
        let (mean_sigma, se_sigma, mse_sigma) = mean_sd_mse(&sig, sigma2.sqrt());
        let (mean_sigma2, se_sigma2, mse_sigma2) = mean_sd_mse(&ok, sigma2);
        Self {
            label,
            failures: draws.len() - ok.len(),
            sigma2_draws: draws,
            k_used,
            first_error,
            mean_sigma,
            se_sigma,
            mse_sigma,
            mean_sigma2,
            se_sigma2,
            mse_sigma2,
        }
    }

    pub fn mse(&self, scale: EfficiencyScale) -> f64 {
        match scale {
            EfficiencyScale::Sd => self.mse_sigma,
            EfficiencyScale::Variance => self.mse_sigma2,
        }
    }

    /// Fraction of replicates in which the estimator used `K = k`.
    pub fn k_share(&self, k: usize) -> f64 {
        let total = self.k_used.len().max(1) as f64;
        self.k_used.iter().filter(|v| **v == Some(k)).count() as f64 / total
    }

    /// Standard error of the mean of `sigma2_hat`.
    pub fn se_of_mean_sigma2(&self) -> Option<f64> {
        let ok = self.sigma2_draws.iter().flatten().count();
        self.se_sigma2.map(|s| s / (ok as f64).sqrt())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub label: String,
    pub seed: u64,
    pub replicates: usize,
    pub n: usize,
    pub true_sigma2: f64,
    pub estimators: Vec<EstimatorStats>,
}

impl SimResult {
    pub fn get(&self, label: &str) -> Option<&EstimatorStats> {
        self.estimators.iter().find(|e| e.label == label)
    }

    fn require(&self, label: &str) -> Result<&EstimatorStats> {
        self.get(label).ok_or_else(|| {
            Error::input(format!("no estimator labelled {label:?} in {}", self.label))
        })
    }
}

type Outcome = std::result::Result<(f64, Option<usize>), String>;

/// Runs every estimator on the same `replicates` draws of `theta + eps`.
/// Estimator errors are recorded per replicate rather than aborting the run.
pub fn run_table(
    config: &SimScenario,
    estimators: &[EstimatorKind],
    exec: Execution,
) -> Result<SimResult> {
    if config.replicates == 0 {
        return Err(Error::domain("at least one replicate is required"));
    }
    if estimators.is_empty() {
        return Err(Error::input("no estimators requested"));
    }
    for e in estimators {
        e.validate()?;
    }
    let per_rep: Vec<Result<Vec<Outcome>>> = map_indexed(config.replicates, exec, |r| {
        let x = config.replicate_series(r)?;
        Ok(estimators
            .iter()
            .map(|e| {
                e.evaluate(&x)
                    .map(|v| (v.sigma2_hat, v.k_used))
                    .map_err(|err| err.to_string())
            })
            .collect())
    });
    let per_rep: Vec<Vec<Outcome>> = per_rep.into_iter().collect::<Result<_>>()?;

    let sigma2 = config.noise.moments().sigma2();
    let stats = estimators
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let mut draws = Vec::with_capacity(config.replicates);
            let mut ks = Vec::with_capacity(config.replicates);
            let mut first_error = None;
            for rep in &per_rep {
                match &rep[j] {
                    Ok((v, k)) => {
                        draws.push(Some(*v));
                        ks.push(*k);
                    }
                    Err(msg) => {
                        draws.push(None);
                        ks.push(None);
                        first_error.get_or_insert_with(|| msg.clone());
                    }
                }
            }
            EstimatorStats::summarise(e.label(), draws, ks, first_error, sigma2)
        })
        .collect();

    Ok(SimResult {
        label: config.label.clone(),
        seed: config.seed,
        replicates: config.replicates,
        n: config.n(),
        true_sigma2: sigma2,
        estimators: stats,
    })
}

/// `MSE(method) / MSE(oracle)` for every estimator, in result order.
pub fn relative_efficiency(
    result: &SimResult,
    oracle_label: &str,
    scale: EfficiencyScale,
) -> Result<Vec<(String, f64)>> {
    let oracle = result.require(oracle_label)?.mse(scale);
    Ok(result
        .estimators
        .iter()
        .map(|e| {
            let re = if e.label == oracle_label {
                1.0
            } else {
                e.mse(scale) / oracle
            };
            (e.label.clone(), re)
        })
        .collect())
}

/// Bootstrap standard error of `MSE(a) - MSE(b)` (on the chosen scale),
/// resampling replicates jointly so the pairing of draws is kept.
pub fn mse_difference_bootstrap_se(
    result: &SimResult,
    a: &str,
    b: &str,
    scale: EfficiencyScale,
    resamples: usize,
    seed: u64,
) -> Result<f64> {
    use rand::Rng;
    let (ea, eb) = (result.require(a)?, result.require(b)?);
    let truth = result.true_sigma2;
    let loss = |v: f64| match scale {
        EfficiencyScale::Sd => (sigma_of(v) - truth.sqrt()).powi(2),
        EfficiencyScale::Variance => (v - truth).powi(2),
    };
    let diffs: Vec<f64> = ea
        .sigma2_draws
        .iter()
        .zip(&eb.sigma2_draws)
        .filter_map(|(x, y)| Some(loss((*x)?) - loss((*y)?)))
        .collect();
    let m = diffs.len();
    if m < 2 || resamples < 2 {
        return Err(Error::domain(
            "bootstrap needs at least two paired replicates and resamples",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<f64> = (0..resamples)
        .map(|_| (0..m).map(|_| diffs[rng.random_range(0..m)]).sum::<f64>() / m as f64)
        .collect();
    let mu = means.iter().sum::<f64>() / resamples as f64;
    Ok((means.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (resamples - 1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::scenario::build_scenario;

    fn scenario(reps: usize) -> SimScenario {
        SimScenario {
            label: "S3-G".into(),
            mean: Arc::new(build_scenario(3, 200).unwrap()),
            noise: NoiseKind::Gaussian,
            replicates: reps,
            seed: 11,
        }
    }

    #[test]
    fn two_replicates_sd() {
        let s = scenario(2);
        let r = run_table(&s, &[EstimatorKind::Eve { k: 5 }], Execution::Sequential).unwrap();
        let e = &r.estimators[0];
        let a = sigma_of(e.sigma2_draws[0].unwrap());
        let b = sigma_of(e.sigma2_draws[1].unwrap());
        assert!((e.se_sigma.unwrap() - (a - b).abs() / 2f64.sqrt()).abs() < 1e-15);
        let one = run_table(&scenario(1), &[EstimatorKind::Mad], Execution::Sequential).unwrap();
        assert!(one.estimators[0].se_sigma.is_none());
    }

    #[test]
    fn thread_count_does_not_matter() {
        let s = scenario(64);
        let ests = [EstimatorKind::Eve { k: 5 }, EstimatorKind::Rice];
        let a = run_table(&s, &ests, Execution::Sequential).unwrap();
        let b = run_table(&s, &ests, Execution::Parallel).unwrap();
        for (x, y) in a.estimators.iter().zip(&b.estimators) {
            assert_eq!(x.sigma2_draws, y.sigma2_draws);
            assert_eq!(x.mean_sigma.to_bits(), y.mean_sigma.to_bits());
        }
    }

    #[test]
    fn failures_are_recorded() {
        let s = SimScenario {
            mean: Arc::new(MeanProfile::constant(8, 0.0).unwrap()),
            ..scenario(3)
        };
        let r = run_table(
            &s,
            &[EstimatorKind::Eve { k: 10 }, EstimatorKind::Rice],
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(r.estimators[0].failures, 3);
        assert!(r.estimators[0].first_error.is_some());
        assert_eq!(r.estimators[1].failures, 0);
    }

    #[test]
    fn oracle_efficiency_is_one() {
        let s = scenario(20);
        let ests = [EstimatorKind::Oracle(s.mean.clone()), EstimatorKind::Rice];
        let r = run_table(&s, &ests, Execution::Sequential).unwrap();
        let re = relative_efficiency(&r, "Oracle", EfficiencyScale::Sd).unwrap();
        assert_eq!(re[0].1, 1.0);
        assert!(re[1].1 > 1.0);
        assert!(relative_efficiency(&r, "nope", EfficiencyScale::Sd).is_err());
    }
}

//! JSON description of a simulation table.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::par::Execution;
use crate::profile::MeanProfile;
use crate::sim::harness::{run_table, EfficiencyScale, SimResult, SimScenario};
use crate::sim::noise::{EmpiricalResiduals, NoiseKind};
use crate::sim::scenario::build_scenario;

/// Default tuning range for `eve:auto`.
pub const DEFAULT_K_RANGE: (usize, usize) = (5, 20);

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSpec {
    Gaussian,
    ScaledT6,
    ExpShifted,
    Empirical {
        path: PathBuf,
        #[serde(default)]
        header: bool,
    },
}

impl NoiseSpec {
    /// Relative residual paths are resolved against `base_dir`.
    pub fn resolve(&self, base_dir: &Path) -> Result<NoiseKind> {
        Ok(match self {
            NoiseSpec::Gaussian => NoiseKind::Gaussian,
            NoiseSpec::ScaledT6 => NoiseKind::ScaledT6,
            NoiseSpec::ExpShifted => NoiseKind::ExpShifted,
            NoiseSpec::Empirical { path, header } => {
                let p = if path.is_absolute() {
                    path.clone()
                } else {
                    base_dir.join(path)
                };
                NoiseKind::Empirical(Arc::new(EmpiricalResiduals::from_csv_path(p, *header)?))
            }
        })
    }
}

/// Estimator named in a config, before the mean is known.
///
/// Grammar: `eve:K`, `eve:auto`, `eve:auto:KMIN:KMAX`, `ms:K`, `gls:L:W`,
/// `mad`, `dk`, `rice`, `oracle`, `sd`.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorSpec {
    Eve(usize),
    EveTuned(usize, usize),
    Ms(usize),
    Gls(usize, f64),
    Mad,
    Dk,
    Rice,
    Oracle,
    SampleSd,
}

fn parse_num<T: FromStr>(s: &str, what: &str, spec: &str) -> Result<T> {
    s.parse().map_err(|_| {
        Error::input(format!(
            "estimator {spec:?}: cannot parse {what} from {s:?}"
        ))
    })
}

impl FromStr for EstimatorSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let lower = spec.trim().to_ascii_lowercase();
        let parts: Vec<&str> = lower.split(':').collect();
        Ok(match parts.as_slice() {
            ["eve", "auto"] => EstimatorSpec::EveTuned(DEFAULT_K_RANGE.0, DEFAULT_K_RANGE.1),
            ["eve", "auto", a, b] => {
                EstimatorSpec::EveTuned(parse_num(a, "K_min", spec)?, parse_num(b, "K_max", spec)?)
            }
            ["eve", k] => EstimatorSpec::Eve(parse_num(k, "K", spec)?),
            ["ms", k] => EstimatorSpec::Ms(parse_num(k, "K", spec)?),
            ["gls", l, w] => EstimatorSpec::Gls(parse_num(l, "L", spec)?, parse_num(w, "w", spec)?),
            ["mad"] => EstimatorSpec::Mad,
            ["dk"] => EstimatorSpec::Dk,
            ["rice"] => EstimatorSpec::Rice,
            ["oracle"] => EstimatorSpec::Oracle,
            ["sd"] => EstimatorSpec::SampleSd,
            _ => return Err(Error::input(format!("unknown estimator {spec:?}"))),
        })
    }
}

impl EstimatorSpec {
    pub fn to_kind(&self, theta: &Arc<MeanProfile>) -> EstimatorKind {
        match *self {
            EstimatorSpec::Eve(k) => EstimatorKind::Eve { k },
            EstimatorSpec::EveTuned(k_min, k_max) => EstimatorKind::EveTuned { k_min, k_max },
            EstimatorSpec::Ms(k) => EstimatorKind::Ms { k },
            EstimatorSpec::Gls(l, w) => EstimatorKind::Gls { l, w },
            EstimatorSpec::Mad => EstimatorKind::Mad,
            EstimatorSpec::Dk => EstimatorKind::Dk,
            EstimatorSpec::Rice => EstimatorKind::Rice,
            EstimatorSpec::Oracle => EstimatorKind::Oracle(theta.clone()),
            EstimatorSpec::SampleSd => EstimatorKind::SampleSd,
        }
    }
}

fn default_oracle() -> String {
    "Oracle".into()
}

/// A table: every scenario crossed with every noise, rows ordered by scenario
/// then noise.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub scenarios: Vec<u8>,
    pub noises: Vec<NoiseSpec>,
    pub estimators: Vec<String>,
    #[serde(default)]
    pub efficiency_scale: EfficiencyScale,
    /// Label of the reference estimator for relative efficiency.
    #[serde(default = "default_oracle")]
    pub oracle_label: String,
}

impl SimConfig {
    pub fn from_json_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn estimator_specs(&self) -> Result<Vec<EstimatorSpec>> {
        self.estimators.iter().map(|s| s.parse()).collect()
    }

    /// Expands the config into runnable scenarios with their estimator lists.
    pub fn expand(&self, base_dir: &Path) -> Result<Vec<(SimScenario, Vec<EstimatorKind>)>> {
        let specs = self.estimator_specs()?;
        let noises: Vec<NoiseKind> = self
            .noises
            .iter()
            .map(|n| n.resolve(base_dir))
            .collect::<Result<_>>()?;
        let mut out = Vec::new();
        for &id in &self.scenarios {
            let theta = Arc::new(build_scenario(id, self.n)?);
            for noise in &noises {
                let scenario = SimScenario {
                    label: format!("S{id}-{}", noise.code()),
                    mean: theta.clone(),
                    noise: noise.clone(),
                    replicates: self.replicates,
                    seed: self.seed,
                };
                let kinds = specs.iter().map(|s| s.to_kind(&theta)).collect();
                out.push((scenario, kinds));
            }
        }
        Ok(out)
    }

    pub fn run(&self, base_dir: &Path, exec: Execution) -> Result<Vec<SimResult>> {
        self.expand(base_dir)?
            .iter()
            .map(|(s, k)| run_table(s, k, exec))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_estimators() {
        assert_eq!(
            "eve:10".parse::<EstimatorSpec>().unwrap(),
            EstimatorSpec::Eve(10)
        );
        assert_eq!(
            "EVE:auto".parse::<EstimatorSpec>().unwrap(),
            EstimatorSpec::EveTuned(5, 20)
        );
        assert_eq!(
            "eve:auto:3:8".parse::<EstimatorSpec>().unwrap(),
            EstimatorSpec::EveTuned(3, 8)
        );
        assert_eq!(
            "gls:10:0.05".parse::<EstimatorSpec>().unwrap(),
            EstimatorSpec::Gls(10, 0.05)
        );
        assert!("eve:x".parse::<EstimatorSpec>().is_err());
        assert!("foo".parse::<EstimatorSpec>().is_err());
    }

    #[test]
    fn parses_config() {
        let cfg: SimConfig = serde_json::from_str(
            r#"{"n": 1000, "replicates": 5, "seed": 1, "scenarios": [1, 3],
                "noises": ["gaussian", "scaled_t6", {"empirical": {"path": "r.csv"}}],
                "estimators": ["eve:10", "oracle"]}"#,
        )
        .unwrap();
        assert_eq!(cfg.efficiency_scale, EfficiencyScale::Sd);
        assert_eq!(
            cfg.noises[2],
            NoiseSpec::Empirical {
                path: "r.csv".into(),
                header: false
            }
        );
        assert!(serde_json::from_str::<SimConfig>(r#"{"n": 1, "bogus": 2}"#).is_err());
    }

    #[test]
    fn expansion_order_and_labels() {
        let cfg: SimConfig = serde_json::from_str(
            r#"{"n": 20, "replicates": 2, "seed": 1, "scenarios": [1, 3],
                "noises": ["gaussian", "exp_shifted"], "estimators": ["rice"]}"#,
        )
        .unwrap();
        let labels: Vec<String> = cfg
            .expand(Path::new("."))
            .unwrap()
            .into_iter()
            .map(|(s, _)| s.label)
            .collect();
        assert_eq!(labels, ["S1-G", "S1-E", "S3-G", "S3-E"]);
    }
}

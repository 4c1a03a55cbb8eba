//! Monte Carlo study: mean scenarios, noise laws, replicate execution and
//! table output.

mod config;
mod harness;
mod noise;
mod report;
mod scenario;

pub use config::{EstimatorSpec, NoiseSpec, SimConfig, DEFAULT_K_RANGE};
pub use harness::{
    mse_difference_bootstrap_se, relative_efficiency, run_table, EfficiencyScale, EstimatorStats,
    SimResult, SimScenario,
};
pub use noise::{sample_noise, EmpiricalResiduals, NoiseKind};
pub use report::{write_efficiency_table, write_means_table};
pub use scenario::build_scenario;

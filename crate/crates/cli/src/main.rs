//! `eve`: variance estimation for piecewise-constant signals from the shell.
//!
//! Exit codes: 0 on success, 1 for unusable input, 2 for usage errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use eve_core::estimators::{tune_k, tune_k_scores, EstimatorKind};
use eve_core::risk::{bound_curves, write_bound_curves_csv};
use eve_core::sim::{write_efficiency_table, write_means_table, SimConfig, DEFAULT_K_RANGE};
use eve_core::verifier::{read_matrix_csv, verify, Tolerance};
use eve_core::{CircularSeries, Execution, QuadEstimator};

#[derive(Parser)]
#[command(
    name = "eve",
    version,
    about = "Noise variance estimation with change points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the noise level of a one-column CSV series.
    Estimate(EstimateArgs),
    /// Run a simulation table described by a JSON config.
    Simulate(SimulateArgs),
    /// Emit minimax risk bound curves as CSV.
    Risk(RiskArgs),
    /// Check equivariance and unbiasedness of a quadratic estimator.
    Verify(VerifyArgs),
    /// Score each K and report the data-driven choice.
    Tune(TuneArgs),
}

#[derive(Args)]
struct Input {
    /// One-column CSV file.
    input: PathBuf,
    /// The first row is a header.
    #[arg(long)]
    header: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Eve,
    Ms,
    Gls,
    Mad,
    Dk,
    Rice,
    Sd,
    All,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value = "eve")]
    estimator: Which,
    /// Number of lags for EVE and MS, or `auto`.
    #[arg(long = "K", default_value = "10")]
    k: String,
    /// Minimal segment length assumed by GLS.
    #[arg(long = "L", default_value_t = 10)]
    l: usize,
    /// Mean-variation ratio assumed by GLS.
    #[arg(long, default_value_t = 0.0)]
    w: f64,
}

#[derive(Args)]
struct SimulateArgs {
    config: PathBuf,
    /// Directory receiving table1.csv and table3.csv.
    #[arg(long)]
    out: PathBuf,
    /// Run replicates on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct RiskArgs {
    /// Comma-separated minimal segment lengths.
    #[arg(long = "L", value_delimiter = ',', default_value = "10,15")]
    l: Vec<usize>,
    #[arg(long, default_value_t = 0.8)]
    w_max: f64,
    /// Number of grid intervals on [0, w_max].
    #[arg(long, default_value_t = 80)]
    steps: usize,
    #[arg(long, default_value_t = 3.0)]
    kappa4: f64,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Dense matrix as headerless CSV.
    #[arg(required_unless_present = "c", conflicts_with = "c")]
    matrix: Option<PathBuf>,
    /// Coefficients `c_1,...,c_L` of `sum c_k Y_k`.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Series length for `--c`; defaults to `4 max(L, len(c)) + 1`.
    #[arg(long)]
    n: Option<usize>,
    /// Minimal segment length of the profile class.
    #[arg(long = "L")]
    l: usize,
    /// Also check unbiasedness over classical (non-circular) profiles.
    #[arg(long)]
    classical: bool,
    /// Exact integer arithmetic instead of the default tolerance.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = DEFAULT_K_RANGE.0)]
    k_min: usize,
    #[arg(long, default_value_t = DEFAULT_K_RANGE.1)]
    k_max: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    let result = match cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Simulate(a) => simulate(a),
        Command::Risk(a) => risk(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Tune(a) => tune(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// `EVE_THREADS` caps the worker pool; unset or 0 uses every core.
fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("EVE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("EVE_THREADS must be a non-negative integer, got {raw:?}"))?;
    #[cfg(feature = "parallel")]
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("could not configure the thread pool")?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn read_series(input: &Input) -> anyhow::Result<CircularSeries> {
    let x = CircularSeries::from_csv_path(&input.input, input.header)?;
    if x.len() < 4 {
        bail!("need at least 4 observations, got {}", x.len());
    }
    Ok(x)
}

fn estimate(a: EstimateArgs) -> anyhow::Result<()> {
    let x = read_series(&a.input)?;
    let k = match a.k.trim() {
        "auto" => None,
        s => Some(
            s.parse::<usize>()
                .map_err(|_| anyhow!("--K expects an integer or `auto`, got {s:?}"))?,
        ),
    };
    let (k_min, k_max) = DEFAULT_K_RANGE;
    let ms_k = match k {
        Some(k) => k,
        None => tune_k(&x, k_min, k_max)?,
    };
    let eve = match k {
        Some(k) => EstimatorKind::Eve { k },
        None => EstimatorKind::EveTuned { k_min, k_max },
    };
    let kinds = match a.estimator {
        Which::Eve => vec![eve],
        Which::Ms => vec![EstimatorKind::Ms { k: ms_k }],
        Which::Gls => vec![EstimatorKind::Gls { l: a.l, w: a.w }],
        Which::Mad => vec![EstimatorKind::Mad],
        Which::Dk => vec![EstimatorKind::Dk],
        Which::Rice => vec![EstimatorKind::Rice],
        Which::Sd => vec![EstimatorKind::SampleSd],
        Which::All => vec![
            eve,
            EstimatorKind::Ms { k: ms_k },
            EstimatorKind::Gls { l: a.l, w: a.w },
            EstimatorKind::Mad,
            EstimatorKind::Dk,
            EstimatorKind::Rice,
            EstimatorKind::SampleSd,
        ],
    };
    let mut wtr = csv::Writer::from_writer(io::stdout().lock());
    wtr.write_record(["name", "K_used", "sigma_hat", "sigma2_hat"])?;
    for kind in kinds {
        kind.validate()?;
        let est = kind.evaluate(&x)?;
        let k_used = est.k_used.map_or("NA".to_string(), |k| k.to_string());
        wtr.write_record([
            kind.label(),
            k_used,
            est.sigma_hat.to_string(),
            est.sigma2_hat.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

fn simulate(a: SimulateArgs) -> anyhow::Result<()> {
    let cfg = SimConfig::from_json_path(&a.config)?;
    let base = a.config.parent().unwrap_or(Path::new("."));
    let exec = if a.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let results = cfg.run(base, exec)?;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let create = |name: &str| -> anyhow::Result<fs::File> {
        let p = a.out.join(name);
        fs::File::create(&p).with_context(|| format!("cannot write {}", p.display()))
    };
    write_means_table(create("table1.csv")?, &results)?;
    let has_reference = results
        .first()
        .is_some_and(|r| r.get(&cfg.oracle_label).is_some());
    if has_reference {
        write_efficiency_table(
            create("table3.csv")?,
            &results,
            &cfg.oracle_label,
            cfg.efficiency_scale,
        )?;
    } else {
        eprintln!(
            "note: no estimator labelled {:?}; table3.csv not written",
            cfg.oracle_label
        );
    }
    for r in &results {
        for e in r.estimators.iter().filter(|e| e.failures > 0) {
            eprintln!(
                "note: {} {} failed in {} replicates: {}",
                r.label,
                e.label,
                e.failures,
                e.first_error.as_deref().unwrap_or("")
            );
        }
    }
    Ok(())
}

fn risk(a: RiskArgs) -> anyhow::Result<()> {
    let rows = bound_curves(&a.l, a.w_max, a.steps, a.kappa4)?;
    match &a.out {
        Some(p) => {
            let f = fs::File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
            write_bound_curves_csv(f, &rows)?;
        }
        None => write_bound_curves_csv(io::stdout().lock(), &rows)?,
    }
    Ok(())
}

fn parse_coefficients(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("cannot parse coefficient {t:?}"))
        })
        .collect()
}

fn verify_cmd(a: VerifyArgs) -> anyhow::Result<()> {
    let (matrix, coefficients) = match (&a.matrix, &a.c) {
        (Some(path), None) => (read_matrix_csv(path)?, None),
        (None, Some(c)) => {
            let c = parse_coefficients(c)?;
            let n = a.n.unwrap_or(4 * a.l.max(c.len()) + 1);
            (QuadEstimator::from_coefficients(n, &c)?, Some(c))
        }
        _ => bail!("give either a matrix file or --c"),
    };
    let tol = if a.exact {
        Tolerance::Exact
    } else {
        Tolerance::Standard
    };
    let mut v = verify(
        &matrix,
        a.l,
        coefficients.as_deref(),
        tol,
        Execution::default(),
    )?;
    if !a.classical {
        v.unbiased_classical = None;
        v.classical_conditions = None;
    }
    let out = json!({
        "n": v.n,
        "L": v.l,
        "equivariant": v.equivariant,
        "unbiased_circular": v.unbiased_circular.as_ref().map(|r| r.holds),
        "unbiased_classical": v.unbiased_classical.as_ref().map(|r| r.holds),
        "in_QL": v.constraints.as_ref().map(|c| c.in_ql),
        "details": v,
    });
    let mut stdout = io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, &out)?;
    writeln!(stdout)?;
    Ok(())
}

fn tune(a: TuneArgs) -> anyhow::Result<()> {
    let x = read_series(&a.input)?;
    let outcome = tune_k_scores(&x, a.k_min, a.k_max)?;
    let mut wtr = csv::Writer::from_writer(io::stdout().lock());
    wtr.write_record(["K", "score", "selected"])?;
    for (k, score) in &outcome.scores {
        wtr.write_record([
            k.to_string(),
            score.to_string(),
            (*k == outcome.k).to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

//! CSV tables of simulation results.

use std::io::Write;

use crate::error::{Error, Result};
use crate::sim::harness::{relative_efficiency, EfficiencyScale, SimResult};

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => x.to_string(),
        _ => "NA".into(),
    }
}

fn labels(results: &[SimResult]) -> Result<Vec<String>> {
    let first = results
        .first()
        .ok_or_else(|| Error::input("no simulation results to write"))?;
    let labels: Vec<String> = first.estimators.iter().map(|e| e.label.clone()).collect();
    for r in results {
        if r.estimators.iter().map(|e| &e.label).ne(labels.iter()) {
            return Err(Error::input("all rows of a table need the same estimators"));
        }
    }
    Ok(labels)
}

/// Mean `sigma_hat` and its standard deviation across replicates, one row per
/// scenario: `scenario,<est>,<est>_se,...`.
pub fn write_means_table<W: Write>(writer: W, results: &[SimResult]) -> Result<()> {
    let labels = labels(results)?;
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["scenario".to_string()];
    for l in &labels {
        header.push(l.clone());
        header.push(format!("{l}_se"));
    }
    wtr.write_record(&header)?;
    for r in results {
        let mut row = vec![r.label.clone()];
        for e in &r.estimators {
            row.push(cell(Some(e.mean_sigma)));
            row.push(cell(e.se_sigma));
        }
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

/// Relative efficiency to the reference estimator, one row per scenario:
/// `scenario,<est>,...`.
pub fn write_efficiency_table<W: Write>(
    writer: W,
    results: &[SimResult],
    oracle_label: &str,
    scale: EfficiencyScale,
) -> Result<()> {
    let labels = labels(results)?;
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["scenario".to_string()];
    header.extend(labels);
    wtr.write_record(&header)?;
    for r in results {
        let mut row = vec![r.label.clone()];
        for (_, re) in relative_efficiency(r, oracle_label, scale)? {
            row.push(cell(Some(re)));
        }
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

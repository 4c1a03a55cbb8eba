//! Readers for matrices and coefficient vectors.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::quadform::QuadEstimator;

/// Reads a dense square matrix, one row per CSV record, no header.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<QuadEstimator> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut rows = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::input(format!("row {}: cannot parse {f:?}", r + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    QuadEstimator::from_rows(&rows)
}

/// A coefficient vector `c_1..c_L`, optionally with the series length.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum CoefSpec {
    Bare(Vec<f64>),
    WithLength { c: Vec<f64>, n: Option<usize> },
}

impl CoefSpec {
    pub fn coefficients(&self) -> &[f64] {
        match self {
            CoefSpec::Bare(c) | CoefSpec::WithLength { c, .. } => c,
        }
    }

    pub fn n(&self) -> Option<usize> {
        match self {
            CoefSpec::Bare(_) => None,
            CoefSpec::WithLength { n, .. } => *n,
        }
    }
}

/// Reads `[c1, c2, ...]` or `{"c": [...], "n": 100}`.
pub fn read_coef_json(path: impl AsRef<Path>) -> Result<CoefSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let spec: CoefSpec = serde_json::from_str(&text)?;
    if spec.coefficients().is_empty() {
        return Err(Error::input("coefficient vector is empty"));
    }
    Ok(spec)
}

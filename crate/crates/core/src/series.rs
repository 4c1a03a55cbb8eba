//! Observed sequences with circular indexing.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Smallest series length accepted by the toolkit.
pub const MIN_LEN: usize = 4;

/// A finite real sequence `X_1..X_n` whose index set is arranged on a circle,
/// so `X_i` and `X_{i+n}` denote the same observation.
#[derive(Debug, Clone, PartialEq)]
pub struct CircularSeries {
    values: Vec<f64>,
}

impl CircularSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_LEN {
            return Err(Error::input(format!(
                "series has {} values, at least {MIN_LEN} are required",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "value at row {} is not finite",
                pos + 1
            )));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// 1-based circular access: any integer `i` maps to `X_{(i-1) mod n + 1}`.
    pub fn get(&self, i: i64) -> f64 {
        self.values[self.wrap(i)]
    }

    /// Zero-based storage position of the 1-based circular index `i`.
    fn wrap(&self, i: i64) -> usize {
        (i - 1).rem_euclid(self.values.len() as i64) as usize
    }

    /// Cyclic shift: entry `i` of the result is entry `i + m` of `self`.
    pub fn rotate(&self, m: i64) -> CircularSeries {
        let n = self.values.len();
        let shift = m.rem_euclid(n as i64) as usize;
        let mut values = Vec::with_capacity(n);
        values.extend_from_slice(&self.values[shift..]);
        values.extend_from_slice(&self.values[..shift]);
        CircularSeries { values }
    }

    /// Multiplies every value by `c`.
    pub fn scaled(&self, c: f64) -> CircularSeries {
        CircularSeries {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn from_csv_reader<R: Read>(reader: R, has_header: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(has_header)
            .trim(csv::Trim::All)
            .flexible(false)
            .from_reader(reader);
        let mut values = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 1 {
                return Err(Error::input(format!(
                    "row {} has {} columns, expected one",
                    row + 1,
                    record.len()
                )));
            }
            let field = &record[0];
            let v: f64 = field.parse().map_err(|_| {
                Error::input(format!(
                    "row {}: cannot parse {field:?} as a number",
                    row + 1
                ))
            })?;
            values.push(v);
        }
        Self::new(values)
    }

    pub fn from_csv_path(path: impl AsRef<Path>, has_header: bool) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file, has_header)
    }

    /// Writes one value per line using the shortest representation that
    /// parses back to the same `f64`.
    pub fn to_csv_writer<W: Write>(&self, writer: W, header: Option<&str>) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        if let Some(h) = header {
            wtr.write_record([h])?;
        }
        for v in &self.values {
            wtr.write_record([v.to_string()])?;
        }
        wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

//! Piecewise-constant mean vectors.

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// How the seam between index `n` and index `1` is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Indices live on a circle; a constant run may wrap across the seam.
    Circular,
    /// Index `n` is always a change point (`tau_J = n`), as in the classical
    /// change-point model.
    Classical,
}

/// A maximal run of constant mean. `start` is 1-based; a circular segment may
/// wrap past `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
    pub level: f64,
}

/// A piecewise-constant mean vector `theta` together with its segment
/// structure.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanProfile {
    values: Vec<f64>,
    segments: Vec<Segment>,
    change_points: Vec<usize>,
    boundary: Boundary,
}

impl MeanProfile {
    /// Builds the circular profile of `values`, merging equal neighbours
    /// including across the `n -> 1` seam.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::build(values, Boundary::Circular)
    }

    /// Builds the classical profile of `values`: index `n` is a forced
    /// boundary even when `theta_n == theta_1`.
    pub fn classical_from_values(values: Vec<f64>) -> Result<Self> {
        Self::build(values, Boundary::Classical)
    }

    pub fn constant(n: usize, level: f64) -> Result<Self> {
        Self::from_values(vec![level; n])
    }

    /// Builds a profile from `(start, level)` pairs, 1-based starts in
    /// increasing order. Adjacent levels must differ, otherwise the pairs do
    /// not describe maximal runs and an error is returned.
    pub fn from_segments(n: usize, segments: &[(usize, f64)], boundary: Boundary) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::input("at least one segment is required"));
        }
        if segments.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::input("segment starts must be strictly increasing"));
        }
        if segments[0].0 < 1 || segments[segments.len() - 1].0 > n {
            return Err(Error::input(format!("segment starts must lie in 1..={n}")));
        }
        if boundary == Boundary::Classical && segments[0].0 != 1 {
            return Err(Error::input(
                "classical profiles start a segment at index 1",
            ));
        }
        let mut values = vec![0.0; n];
        let m = segments.len();
        for (j, &(start, level)) in segments.iter().enumerate() {
            let end = if j + 1 < m {
                segments[j + 1].0
            } else {
                n + segments[0].0
            };
            for i in start..end {
                values[(i - 1) % n] = level;
            }
        }
        let profile = Self::build(values, boundary)?;
        let requested: Vec<usize> = segments.iter().map(|s| s.0).collect();
        let mut derived: Vec<usize> = profile.segments.iter().map(|s| s.start).collect();
        derived.sort_unstable();
        if requested != derived && !(profile.is_constant() && m == 1) {
            return Err(Error::input(
                "adjacent segments share a level; segments must be maximal runs",
            ));
        }
        Ok(profile)
    }

    /// `n / block_len` consecutive blocks of length `block_len` with levels
    /// `+amplitude, -amplitude, ...` starting at index 1.
    pub fn alternating_blocks(n: usize, block_len: usize, amplitude: f64) -> Result<Self> {
        if block_len == 0 || !n.is_multiple_of(block_len) {
            return Err(Error::input(format!(
                "{n} is not a multiple of block length {block_len}"
            )));
        }
        let values = (0..n)
            .map(|i| {
                if (i / block_len).is_multiple_of(2) {
                    amplitude
                } else {
                    -amplitude
                }
            })
            .collect();
        Self::from_values(values)
    }

    fn build(values: Vec<f64>, boundary: Boundary) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::input("a mean profile needs at least two entries"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("mean profile entries must be finite"));
        }
        // tau: 1-based positions i with theta_i != theta_{i+1}.
        let mut change_points: Vec<usize> =
            (1..n).filter(|&i| values[i - 1] != values[i]).collect();
        match boundary {
            Boundary::Circular => {
                if values[n - 1] != values[0] {
                    change_points.push(n);
                }
            }
            Boundary::Classical => change_points.push(n),
        }

        let segments = if change_points.is_empty() {
            vec![Segment {
                start: 1,
                len: n,
                level: values[0],
            }]
        } else {
            let j = change_points.len();
            let mut segs: Vec<Segment> = (0..j)
                .map(|idx| {
                    let tau = change_points[idx];
                    let next = if idx + 1 < j {
                        change_points[idx + 1]
                    } else {
                        change_points[0] + n
                    };
                    let start = tau % n + 1;
                    Segment {
                        start,
                        len: next - tau,
                        level: values[start - 1],
                    }
                })
                .collect();
            segs.sort_by_key(|s| s.start);
            segs
        };

        Ok(Self {
            values,
            segments,
            change_points,
            boundary,
        })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Change-point locations `tau_1 < ... < tau_J` (1-based).
    pub fn change_points(&self) -> &[usize] {
        &self.change_points
    }

    /// Number of change points `J`.
    pub fn num_change_points(&self) -> usize {
        self.change_points.len()
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    /// Minimal segment length `L(theta)`; `n` for a constant circular profile.
    pub fn min_segment_len(&self) -> usize {
        self.segments
            .iter()
            .map(|s| s.len)
            .min()
            .unwrap_or(self.n())
    }

    /// 1-based circular access.
    pub fn get(&self, i: i64) -> f64 {
        let n = self.values.len() as i64;
        self.values[(i - 1).rem_euclid(n) as usize]
    }

    /// Circular total variation `W(theta) = sum_{i=1}^n (theta_i - theta_{i+1})^2`.
    pub fn w(&self) -> f64 {
        self.lag_variation(1)
    }

    /// Linear total variation `V(theta) = sum_{i=1}^{n-1} (theta_i - theta_{i+1})^2`.
    pub fn v(&self) -> f64 {
        compensated_sum(self.values.windows(2).map(|p| (p[0] - p[1]).powi(2)))
    }

    /// `sum_{i=1}^n (theta_i - theta_{i+m})^2` with circular indexing.
    pub fn lag_variation(&self, m: usize) -> f64 {
        let n = self.values.len();
        compensated_sum((0..n).map(|i| (self.values[i] - self.values[(i + m) % n]).powi(2)))
    }

    pub fn squared_norm(&self) -> f64 {
        compensated_sum(self.values.iter().map(|v| v * v))
    }

    /// Returns `c * theta`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::build(self.values.iter().map(|v| v * c).collect(), self.boundary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_profile() {
        let p = MeanProfile::constant(10, 2.5).unwrap();
        assert_eq!(p.num_change_points(), 0);
        assert_eq!(p.min_segment_len(), 10);
        assert_eq!(p.w(), 0.0);
        assert_eq!(p.v(), 0.0);
        let c = MeanProfile::classical_from_values(vec![2.5; 10]).unwrap();
        assert_eq!(c.change_points(), &[10]);
        assert_eq!(c.min_segment_len(), 10);
    }

    #[test]
    fn circular_merge_across_seam() {
        // (0,0,1,1,1,1,0,0): one wrapping segment of length 4 plus one of length 4.
        let p = MeanProfile::from_values(vec![0., 0., 1., 1., 1., 1., 0., 0.]).unwrap();
        assert_eq!(p.change_points(), &[2, 6]);
        assert_eq!(p.min_segment_len(), 4);
        assert_eq!(
            p.segments(),
            &[
                Segment {
                    start: 3,
                    len: 4,
                    level: 1.0
                },
                Segment {
                    start: 7,
                    len: 4,
                    level: 0.0
                },
            ]
        );
        // The same vector is not in the classical class with L = 4.
        let c = MeanProfile::classical_from_values(p.values().to_vec()).unwrap();
        assert_eq!(c.min_segment_len(), 2);
        assert_eq!(c.change_points(), &[2, 6, 8]);
    }

    #[test]
    fn w_and_v_by_definition() {
        let p = MeanProfile::from_values(vec![1., 1., 3., 3., 0., 0.]).unwrap();
        assert_eq!(p.w(), 4.0 + 9.0 + 1.0);
        assert_eq!(p.v(), 4.0 + 9.0);
    }

    #[test]
    fn from_segments_validates_maximal_runs() {
        let p = MeanProfile::from_segments(8, &[(3, 1.0), (7, 0.0)], Boundary::Circular).unwrap();
        assert_eq!(p.values(), &[0., 0., 1., 1., 1., 1., 0., 0.]);
        assert!(MeanProfile::from_segments(8, &[(1, 1.0), (5, 1.0)], Boundary::Circular).is_err());
        assert!(MeanProfile::from_segments(8, &[(5, 1.0), (3, 0.0)], Boundary::Circular).is_err());
        let c = MeanProfile::from_segments(8, &[(1, 0.0), (3, 1.0), (7, 0.0)], Boundary::Classical)
            .unwrap();
        assert_eq!(c.min_segment_len(), 2);
    }

    #[test]
    fn alternating_blocks_shape() {
        let p = MeanProfile::alternating_blocks(40, 4, 1.5).unwrap();
        assert_eq!(p.num_change_points(), 10);
        assert_eq!(p.min_segment_len(), 4);
        assert!((p.w() - 10.0 * 9.0).abs() < 1e-12);
        assert!(MeanProfile::alternating_blocks(42, 4, 1.0).is_err());
    }
}

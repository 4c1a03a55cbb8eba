//! Matrix entries as either floats or exact integers on a common binary grid.

use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::quadform::QuadEstimator;

pub(crate) trait Cell:
    Copy + Send + Sync + Default + PartialEq + Add<Output = Self> + Sub<Output = Self>
{
    fn times(self, k: i64) -> Self;
    fn magnitude(self) -> f64;
}

impl Cell for f64 {
    fn times(self, k: i64) -> Self {
        self * k as f64
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Cell for i128 {
    fn times(self, k: i64) -> Self {
        self * k as i128
    }
    fn magnitude(self) -> f64 {
        self.unsigned_abs() as f64
    }
}

/// `v = m * 2^e` with odd `m` (or `m = 0`).
fn decompose(v: f64) -> (i64, i32) {
    if v == 0.0 {
        return (0, 0);
    }
    let bits = v.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (mut m, mut e) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1i64 << 52), biased - 1075)
    };
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i32;
    if v < 0.0 {
        m = -m;
    }
    (m, e)
}

/// Entries of `a` scaled by `2^-e0` so that every one is an integer, with `e0`
/// the smallest exponent present. Fails when sums of up to `4 n^2` entries
/// could overflow `i128`.
pub(crate) struct ExactGrid {
    pub values: Vec<i128>,
    pub exponent: i32,
}

impl ExactGrid {
    pub fn from_quad(a: &QuadEstimator) -> Result<Self> {
        let n = a.n();
        let parts: Vec<(i64, i32)> = (0..n * n).map(|p| decompose(a.at(p / n, p % n))).collect();
        let e0 = parts
            .iter()
            .filter(|(m, _)| *m != 0)
            .map(|(_, e)| *e)
            .min()
            .unwrap_or(0);
        let headroom = 2 * (usize::BITS - (2 * n).leading_zeros()) as i32;
        let mut values = Vec::with_capacity(n * n);
        for (m, e) in parts {
            if m == 0 {
                values.push(0);
                continue;
            }
            let shift = e - e0;
            if 54 + shift + headroom > 126 {
                return Err(Error::domain(
                    "matrix entries span too many binary orders of magnitude for exact checks",
                ));
            }
            values.push((m as i128) << shift);
        }
        Ok(Self {
            values,
            exponent: e0,
        })
    }

    /// The grid value of `1`, if it is an integer on this grid.
    pub fn one(&self) -> Option<i128> {
        if self.exponent > 0 || -self.exponent > 120 {
            None
        } else {
            Some(1i128 << (-self.exponent))
        }
    }

    pub fn to_real(&self, v: f64) -> f64 {
        v * 2f64.powi(self.exponent)
    }
}

/// 2-D prefix sums over an `rows x cols` matrix given by `get`.
pub(crate) struct Prefix<T> {
    cols: usize,
    data: Vec<T>,
}

impl<T: Cell> Prefix<T> {
    pub fn build(rows: usize, cols: usize, get: impl Fn(usize, usize) -> T) -> Self {
        let w = cols + 1;
        let mut data = vec![T::default(); (rows + 1) * w];
        for i in 0..rows {
            let mut row = T::default();
            for j in 0..cols {
                row = row + get(i, j);
                data[(i + 1) * w + j + 1] = data[i * w + j + 1] + row;
            }
        }
        Self { cols, data }
    }

    /// Sum over rows `r0..r1` and columns `c0..c1` (half-open, 0-based).
    pub fn rect(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> T {
        let w = self.cols + 1;
        self.data[r1 * w + c1] - self.data[r0 * w + c1] - self.data[r1 * w + c0]
            + self.data[r0 * w + c0]
    }
}

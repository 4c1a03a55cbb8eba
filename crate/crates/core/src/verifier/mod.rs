//! Decision procedures for equivariance and unbiasedness of quadratic
//! estimators `X^T A X`.
//!
//! Unbiasedness over a class of piecewise-constant means reduces to
//! `tr A = 1` plus vanishing sums of `A` over square blocks indexed by
//! intervals of the class. Every block sum is read off 2-D prefix sums, so a
//! full check costs `O(n^2)`.

mod grid;
mod io;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::quadform::QuadEstimator;
use crate::risk::is_in_ql;
use grid::{Cell, ExactGrid, Prefix};

pub use io::{read_coef_json, read_matrix_csv, CoefSpec};

/// Tolerance used by the predicates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Tolerance {
    /// `factor * max |a_ij|` per entry.
    Relative(f64),
    /// Fixed per-entry threshold.
    Absolute(f64),
    /// Integer arithmetic on the binary grid of the entries; only exact zeros
    /// pass. Errors for matrices whose entries cannot share such a grid.
    Exact,
    /// `Relative(1e-10)`.
    #[default]
    Standard,
}

impl Tolerance {
    /// Per-entry threshold; aggregated quantities (traces, block sums) use
    /// `n` times this value.
    fn entry_threshold(self, a: &QuadEstimator) -> f64 {
        match self {
            Tolerance::Relative(f) => f * a.max_abs(),
            Tolerance::Absolute(t) => t,
            Tolerance::Exact => 0.0,
            Tolerance::Standard => 1e-10 * a.max_abs(),
        }
    }
}

/// Whether `A` is circulant, i.e. `a_ij = a_{i+1, j+1}` with indices mod `n`.
pub fn is_equivariant(a: &QuadEstimator, tol: Tolerance) -> bool {
    if a.is_compressed_circulant() {
        return true;
    }
    let n = a.n();
    let thr = tol.entry_threshold(a);
    (0..n).all(|i| (0..n).all(|j| (a.at(i, j) - a.at((i + 1) % n, (j + 1) % n)).abs() <= thr))
}

/// Outcome of an unbiasedness check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnbiasednessReport {
    pub trace: f64,
    /// Largest absolute block sum over the interval family.
    pub max_block_sum: f64,
    pub holds: bool,
}

fn trace_ok<T: Cell>(trace: T, one: Option<T>, thr: f64) -> bool {
    match one {
        Some(one) => (trace - one).magnitude() <= thr,
        None => false,
    }
}

/// Circular interval family: `L <= |I| <= n - L` or `|I| = n`, all starts.
fn circular_lengths(n: usize, l: usize) -> Vec<usize> {
    let mut m: Vec<usize> = (l..=n - l).collect();
    if *m.last().unwrap_or(&0) != n {
        m.push(n);
    }
    m
}

fn circular_dense<T: Cell>(
    n: usize,
    l: usize,
    get: impl Fn(usize, usize) -> T + Sync,
    exec: Execution,
) -> T {
    // Doubled matrix so that every circular interval is a contiguous block.
    let prefix = Prefix::build(2 * n, 2 * n, |i, j| get(i % n, j % n));
    let lengths = circular_lengths(n, l);
    let worst = map_indexed(n, exec, |s| {
        lengths
            .iter()
            .map(|&m| prefix.rect(s, s + m, s, s + m))
            .fold(T::default(), |acc, v| {
                if v.magnitude() > acc.magnitude() {
                    v
                } else {
                    acc
                }
            })
    });
    worst.into_iter().fold(T::default(), |acc, v| {
        if v.magnitude() > acc.magnitude() {
            v
        } else {
            acc
        }
    })
}

fn circular_compressed<T: Cell>(n: usize, l: usize, row: impl Fn(usize) -> T) -> T {
    // Block sum over any interval of length m: sum_{|d| < m} (m - |d|) r_d.
    let mut worst = T::default();
    for m in circular_lengths(n, l) {
        let mut s = row(0).times(m as i64);
        for d in 1..m {
            s = s + (row(d % n) + row((n - d % n) % n)).times((m - d) as i64);
        }
        if s.magnitude() > worst.magnitude() {
            worst = s;
        }
    }
    worst
}

/// Unbiasedness over circular profiles with minimal segment length `L`.
pub fn circular_report(
    a: &QuadEstimator,
    l: usize,
    tol: Tolerance,
    exec: Execution,
) -> Result<UnbiasednessReport> {
    let n = a.n();
    if l < 2 || 2 * l > n {
        return Err(Error::domain(format!(
            "need 2 <= L <= n/2, got L = {l}, n = {n}"
        )));
    }
    if tol == Tolerance::Exact {
        let g = ExactGrid::from_quad(a)?;
        let trace: i128 = (0..n).map(|i| g.values[i * n + i]).sum();
        let worst = match a.circulant_row() {
            Some(_) => circular_compressed(n, l, |k| g.values[k]),
            None => circular_dense(n, l, |i, j| g.values[i * n + j], exec),
        };
        let ok = trace_ok(trace, g.one(), 0.0) && worst == 0;
        return Ok(UnbiasednessReport {
            trace: g.to_real(trace as f64),
            max_block_sum: g.to_real(worst.magnitude()),
            holds: ok,
        });
    }
    let thr = tol.entry_threshold(a) * n as f64;
    let trace = a.trace();
    let worst = match a.circulant_row() {
        Some(r) => circular_compressed(n, l, |k| r[k]),
        None => circular_dense(n, l, |i, j| a.at(i, j), exec),
    };
    Ok(UnbiasednessReport {
        trace,
        max_block_sum: worst.abs(),
        holds: trace_ok(trace, Some(1.0), thr) && worst.abs() <= thr,
    })
}

/// `tr A = 1` and zero block sums over every circular interval of length in
/// `[L, n - L]` or equal to `n`.
pub fn is_unbiased_circular(a: &QuadEstimator, l: usize) -> Result<bool> {
    Ok(circular_report(a, l, Tolerance::Standard, Execution::default())?.holds)
}

/// Whether the non-circular interval `[lo, hi]` (1-based) keeps the indicator
/// vector inside the classical class: it must contain or avoid `[1, L]`, and
/// contain or avoid `[n-L+1, n]`.
fn classical_interval(n: usize, l: usize, lo: usize, hi: usize) -> bool {
    let head = (lo == 1 && hi >= l) || lo > l;
    let tail = (hi == n && lo <= n - l + 1) || hi <= n - l;
    head && tail && hi + 1 - lo >= l
}

fn classical_enumeration<T: Cell>(
    n: usize,
    l: usize,
    get: impl Fn(usize, usize) -> T + Sync,
    exec: Execution,
) -> T {
    let prefix = Prefix::build(n, n, &get);
    let worst = map_indexed(n, exec, |s| {
        let lo = s + 1;
        let mut acc = T::default();
        for hi in lo..=n {
            if classical_interval(n, l, lo, hi) {
                let v = prefix.rect(lo - 1, hi, lo - 1, hi);
                if v.magnitude() > acc.magnitude() {
                    acc = v;
                }
            }
        }
        acc
    });
    worst.into_iter().fold(T::default(), |acc, v| {
        if v.magnitude() > acc.magnitude() {
            v
        } else {
            acc
        }
    })
}

/// Unbiasedness over classical profiles (index `n` a forced change point) by
/// enumerating the admissible intervals. Requires `n >= 2L`.
pub fn classical_report(
    a: &QuadEstimator,
    l: usize,
    tol: Tolerance,
    exec: Execution,
) -> Result<UnbiasednessReport> {
    let n = a.n();
    if l < 1 || n < 2 * l {
        return Err(Error::domain(format!("need n >= 2L, got L = {l}, n = {n}")));
    }
    if tol == Tolerance::Exact {
        let g = ExactGrid::from_quad(a)?;
        let trace: i128 = (0..n).map(|i| g.values[i * n + i]).sum();
        let worst = classical_enumeration(n, l, |i, j| g.values[i * n + j], exec);
        return Ok(UnbiasednessReport {
            trace: g.to_real(trace as f64),
            max_block_sum: g.to_real(worst.magnitude()),
            holds: trace_ok(trace, g.one(), 0.0) && worst == 0,
        });
    }
    let thr = tol.entry_threshold(a) * n as f64;
    let trace = a.trace();
    let worst = classical_enumeration(n, l, |i, j| a.at(i, j), exec);
    Ok(UnbiasednessReport {
        trace,
        max_block_sum: worst.abs(),
        holds: trace_ok(trace, Some(1.0), thr) && worst.abs() <= thr,
    })
}

/// Checks the nine sufficient-and-necessary conditions for unbiasedness over
/// classical profiles; returns the labels of the violated ones. Requires
/// `n > 3L`.
pub fn classical_conditions(
    a: &QuadEstimator,
    l: usize,
    tol: Tolerance,
) -> Result<Vec<&'static str>> {
    let n = a.n();
    if l < 1 || n <= 3 * l {
        return Err(Error::domain(format!(
            "the nine-condition check needs n > 3L, got L = {l}, n = {n}"
        )));
    }
    if tol == Tolerance::Exact {
        let g = ExactGrid::from_quad(a)?;
        let one = g.one();
        // Half-diagonal terms: double everything so they stay integral.
        let v = |i: usize, j: usize| 2 * g.values[(i - 1) * n + (j - 1)];
        return Ok(conditions(n, l, v, one.map(|o| 2 * o), 0.0));
    }
    let thr = tol.entry_threshold(a) * n as f64;
    Ok(conditions(n, l, |i, j| a.entry(i, j), Some(1.0), thr))
}

/// `get` is 1-based; `one` is the representation of 1 in the same units.
fn conditions<T: Cell>(
    n: usize,
    l: usize,
    get: impl Fn(usize, usize) -> T,
    one: Option<T>,
    thr: f64,
) -> Vec<&'static str> {
    let zero = |v: T| v.magnitude() <= thr;
    let sum = |rows: std::ops::RangeInclusive<usize>, cols: std::ops::RangeInclusive<usize>| {
        let mut s = T::default();
        for i in rows {
            for j in cols.clone() {
                s = s + get(i, j);
            }
        }
        s
    };
    // half of a_ii, computed as a_ii - a_ii/2 without division: compare
    // 2 * (row part) + a_ii against zero instead.
    let half_rule = |i: usize, cols: std::ops::RangeInclusive<usize>| {
        let s = sum(i..=i, cols);
        zero(s + s + get(i, i))
    };
    let mut failed = Vec::new();

    let trace = (1..=n).fold(T::default(), |acc, i| acc + get(i, i));
    if !one.is_some_and(|o| zero(trace - o)) {
        failed.push("C1");
    }
    if !((2 * l + 1)..=(n - l)).all(|i| zero(sum(i..=i, 1..=l))) {
        failed.push("C2");
    }
    if !((l + 1)..=(n - 2 * l)).all(|i| zero(sum(i..=i, (n - l + 1)..=n))) {
        failed.push("C3");
    }
    if !zero(sum(1..=l, (n - l + 1)..=n)) {
        failed.push("C4");
    }
    let c5 = ((l + 1)..=(n - l))
        .all(|i| ((l + 1)..=(n - l)).all(|j| i.abs_diff(j) <= l || zero(get(i, j))));
    if !c5 {
        failed.push("C5");
    }
    let c6_starts = std::iter::once(1)
        .chain(std::iter::once(n - l + 1))
        .chain((l + 1)..=(n - 2 * l + 1));
    let c6 = c6_starts
        .collect::<Vec<_>>()
        .into_iter()
        .all(|i| zero(sum(i..=(i + l - 1), i..=(i + l - 1))));
    if !c6 {
        failed.push("C6");
    }
    if !((l + 1)..=(n - 2 * l)).all(|i| half_rule(i, (i + 1)..=(i + l))) {
        failed.push("C7");
    }
    if !((n - 2 * l + 1)..=(n - l)).all(|i| half_rule(i, (i + 1)..=n)) {
        failed.push("C8");
    }
    if !((l + 1)..=(2 * l)).all(|i| half_rule(i, 1..=(i - 1))) {
        failed.push("C9");
    }
    failed
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalVerdict {
    pub by_enumeration: bool,
    pub by_c1_to_c9: bool,
    pub failed_conditions: Vec<&'static str>,
}

/// Both classical checks; requires `n > 3L`.
pub fn is_unbiased_classical(a: &QuadEstimator, l: usize) -> Result<ClassicalVerdict> {
    let failed = classical_conditions(a, l, Tolerance::Standard)?;
    let enumeration = classical_report(a, l, Tolerance::Standard, Execution::default())?;
    Ok(ClassicalVerdict {
        by_enumeration: enumeration.holds,
        by_c1_to_c9: failed.is_empty(),
        failed_conditions: failed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub sum_c: f64,
    pub sum_k_c: f64,
    pub in_ql: bool,
}

impl ConstraintReport {
    pub fn from_coefficients(c: &[f64]) -> Self {
        Self {
            sum_c: c.iter().sum(),
            sum_k_c: c.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum(),
            in_ql: is_in_ql(c),
        }
    }
}

/// Combined verdict; checks that do not apply to the given `(n, L)` are
/// reported as `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub equivariant: bool,
    pub unbiased_circular: Option<UnbiasednessReport>,
    pub unbiased_classical: Option<UnbiasednessReport>,
    pub classical_conditions: Option<ClassicalVerdict>,
    pub constraints: Option<ConstraintReport>,
}

pub fn verify(
    a: &QuadEstimator,
    l: usize,
    coefficients: Option<&[f64]>,
    tol: Tolerance,
    exec: Execution,
) -> Result<Verdict> {
    let n = a.n();
    if l < 2 {
        return Err(Error::domain(format!("L must be >= 2, got {l}")));
    }
    let unbiased_circular = if 2 * l <= n {
        Some(circular_report(a, l, tol, exec)?)
    } else {
        None
    };
    let unbiased_classical = if 2 * l <= n {
        Some(classical_report(a, l, tol, exec)?)
    } else {
        None
    };
    let classical_conditions = if n > 3 * l {
        let failed = classical_conditions(a, l, tol)?;
        Some(ClassicalVerdict {
            by_enumeration: unbiased_classical.map(|r| r.holds).unwrap_or(false),
            by_c1_to_c9: failed.is_empty(),
            failed_conditions: failed,
        })
    } else {
        None
    };
    Ok(Verdict {
        n,
        l,
        equivariant: is_equivariant(a, tol),
        unbiased_circular,
        unbiased_classical,
        classical_conditions,
        constraints: coefficients.map(ConstraintReport::from_coefficients),
    })
}

//! Minimax risk bounds over classes of profiles with minimal segment length
//! `L` and `W/(n sigma^2) <= w`.
//!
//! `g_L(lambda) = kappa4 - 1 + [V^{-1}]_{11}` where
//! `V = Z^T (I + lambda U^T U)^{-1} Z` has entries expressed through
//! `D_k = det(I_k + lambda U_k^T U_k)`. The entries are ratios whose
//! numerators vanish at `lambda = 0`, so they are evaluated from the exact
//! polynomial coefficients of `D_k` with the vanishing low-order terms
//! divided out; this keeps `g_L` accurate for small `lambda`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::risk::formulas::{bound_mean_coefficient, design_term};

fn check_l(l: usize) -> Result<()> {
    if l < 2 {
        return Err(Error::domain(format!("L must be >= 2, got {l}")));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    Ok(())
}

/// `D_0..D_L` from `D_k = (2 + lambda) D_{k-1} - D_{k-2}`, `D_0 = 1`,
/// `D_1 = 1 + lambda`.
pub fn d_sequence(lambda: f64, l: usize) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    if l < 1 {
        return Err(Error::domain("L must be >= 1"));
    }
    let mut d = Vec::with_capacity(l + 1);
    d.push(1.0);
    d.push(1.0 + lambda);
    for k in 2..=l {
        d.push((2.0 + lambda) * d[k - 1] - d[k - 2]);
    }
    Ok(d)
}

/// Coefficients (lowest degree first) of `D_0..D_L` as polynomials in lambda.
fn d_polynomials(l: usize) -> Vec<Vec<f64>> {
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0], vec![1.0, 1.0]];
    for k in 2..=l {
        let (a, b) = (&polys[k - 1], &polys[k - 2]);
        let mut p = vec![0.0; a.len() + 1];
        for (i, &v) in a.iter().enumerate() {
            p[i] += 2.0 * v;
            p[i + 1] += v;
        }
        for (i, &v) in b.iter().enumerate() {
            p[i] -= v;
        }
        polys.push(p);
    }
    polys
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `p / lambda^s`, assuming the `s` lowest coefficients vanish.
fn shift_down(mut p: Vec<f64>, s: usize) -> Vec<f64> {
    debug_assert!(p.iter().take(s).all(|&c| c == 0.0));
    p.drain(..s);
    p
}

fn poly_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &v) in a.iter().enumerate() {
        out[i] += v;
    }
    for (i, &v) in b.iter().enumerate() {
        out[i] -= v;
    }
    out
}

/// `V` entries `(v11, v12, v22)` at `lambda`.
fn v_entries(l: usize, lambda: f64) -> (f64, f64, f64) {
    let polys = d_polynomials(l);
    let (dl, dl1) = (&polys[l], &polys[l - 1]);
    // (D_L - D_{L-1}) / lambda
    let n11 = shift_down(poly_sub(dl, dl1), 1);
    // (D_L - 1) / lambda
    let n12 = shift_down(poly_sub(dl, &[1.0]), 1);
    // (D_{L-1} + (lambda L - 1) D_L) / lambda^2
    let mut shifted = vec![0.0; dl.len() + 1];
    for (i, &v) in dl.iter().enumerate() {
        shifted[i + 1] += l as f64 * v;
        shifted[i] -= v;
    }
    let n22 = shift_down(
        poly_sub(&shifted, &dl1.iter().map(|v| -v).collect::<Vec<_>>()),
        2,
    );
    let den = horner(dl, lambda);
    (
        horner(&n11, lambda) / den,
        horner(&n12, lambda) / den,
        horner(&n22, lambda) / den,
    )
}

fn g_from_v(l: usize, lambda: f64, kappa4: f64) -> f64 {
    let (v11, v12, v22) = v_entries(l, lambda);
    kappa4 - 1.0 + v22 / (v11 * v22 - v12 * v12)
}

/// `g_L(lambda)`. At `lambda = 0` the closed form
/// `kappa4 - 1 + (4L + 2)/(L(L - 1))` is returned.
pub fn g_l(l: usize, lambda: f64, kappa4: f64) -> Result<f64> {
    check_l(l)?;
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(kappa4 - 1.0 + design_term(l));
    }
    Ok(g_from_v(l, lambda, kappa4))
}

/// The same rational function evaluated at any `lambda` for which
/// `I + lambda U^T U` stays positive definite, including small negative
/// values. Useful for symmetric difference quotients at zero.
pub fn g_l_extended(l: usize, lambda: f64, kappa4: f64) -> Result<f64> {
    check_l(l)?;
    if !lambda.is_finite() {
        return Err(Error::domain("lambda must be finite"));
    }
    // Leading principal minors of I + lambda H are D_1..D_L.
    let polys = d_polynomials(l);
    if polys.iter().any(|p| horner(p, lambda) <= 0.0) {
        return Err(Error::domain(format!(
            "I + lambda U^T U is not positive definite at lambda = {lambda}"
        )));
    }
    Ok(g_from_v(l, lambda, kappa4))
}

/// `g_L'(0) = (L+1)(L+2)(2L+1) / (15 L (L-1))`, confirmed against
/// difference quotients of [`g_l_extended`].
pub fn g_l_slope_at_zero(l: usize) -> Result<f64> {
    check_l(l)?;
    let lf = l as f64;
    Ok((lf + 1.0) * (lf + 2.0) * (2.0 * lf + 1.0) / (15.0 * lf * (lf - 1.0)))
}

/// Worst-case risk of the OLS estimator with `K = L` over the class:
/// `kappa4 - 1 + (4L+2)/(L(L-1)) + (L+1)(L+2)^2 / (3L(L-1)) w`.
pub fn ols_minimax_upper(l: usize, w: f64, kappa4: f64) -> Result<f64> {
    check_l(l)?;
    check_lambda(w)?;
    Ok(kappa4 - 1.0 + design_term(l) + bound_mean_coefficient(l) * w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimaxBounds {
    pub lower: f64,
    pub upper_ols: f64,
    pub upper_gls: f64,
}

impl MinimaxBounds {
    /// The tighter of the two upper bounds.
    pub fn upper(&self) -> f64 {
        self.upper_ols.min(self.upper_gls)
    }
}

/// Lower bound `g_L(2w)` and upper bounds from OLS and from `g_L(4w)`.
pub fn minimax_bounds(l: usize, w: f64, kappa4: f64) -> Result<MinimaxBounds> {
    Ok(MinimaxBounds {
        lower: g_l(l, 2.0 * w, kappa4)?,
        upper_ols: ols_minimax_upper(l, w, kappa4)?,
        upper_gls: g_l(l, 4.0 * w, kappa4)?,
    })
}

/// One row of a bound-curve table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    #[serde(rename = "L")]
    pub l: usize,
    pub w: f64,
    pub lower: f64,
    pub upper_ols: f64,
    pub upper_gls: f64,
}

/// Bounds for each `L` on the grid `w = w_max * i / steps`, `i = 0..=steps`.
pub fn bound_curves(ls: &[usize], w_max: f64, steps: usize, kappa4: f64) -> Result<Vec<BoundRow>> {
    check_lambda(w_max)?;
    let steps = steps.max(1);
    let mut rows = Vec::with_capacity(ls.len() * (steps + 1));
    for &l in ls {
        for i in 0..=steps {
            let w = w_max * i as f64 / steps as f64;
            let b = minimax_bounds(l, w, kappa4)?;
            rows.push(BoundRow {
                l,
                w,
                lower: b.lower,
                upper_ols: b.upper_ols,
                upper_gls: b.upper_gls,
            });
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with columns `L,w,lower,upper_ols,upper_gls`.
pub fn write_bound_curves_csv<W: Write>(writer: W, rows: &[BoundRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

/// `w` in `(lo, hi)` where the OLS and GLS upper bounds cross, located by
/// bisection; `None` if they do not change order on the interval.
pub fn upper_bound_crossing(l: usize, kappa4: f64, lo: f64, hi: f64) -> Result<Option<f64>> {
    let f = |w: f64| -> Result<f64> {
        let b = minimax_bounds(l, w, kappa4)?;
        Ok(b.upper_ols - b.upper_gls)
    };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a)?, f(b)?);
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 || (b - a) < 1e-14 {
            return Ok(Some(m));
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regression::{design, min_matrix};
    use nalgebra::DMatrix;

    fn dense_g(l: usize, lambda: f64, kappa4: f64) -> f64 {
        let m = DMatrix::<f64>::identity(l, l) + min_matrix(l) * lambda;
        let z = design(l);
        let v = z.transpose() * m.try_inverse().unwrap() * &z;
        kappa4 - 1.0 + v.try_inverse().unwrap()[(0, 0)]
    }

    #[test]
    fn d_sequence_values() {
        assert!(d_sequence(0.0, 6).unwrap().iter().all(|&d| d == 1.0));
        for lam in [0.5, 1.0, 2.0] {
            let d = d_sequence(lam, 2).unwrap();
            assert!((d[2] - (lam * lam + 3.0 * lam + 1.0)).abs() < 1e-12);
        }
        assert!(d_sequence(-0.1, 3).is_err());
    }

    #[test]
    fn d_sequence_is_determinant() {
        for l in 1..=8 {
            for lam in [0.5, 1.0, 2.0] {
                let m = DMatrix::<f64>::identity(l, l) + min_matrix(l) * lam;
                let det = m.determinant();
                let d = d_sequence(lam, l).unwrap()[l];
                assert!(((d - det) / det).abs() < 1e-10, "L={l} lam={lam}");
            }
        }
    }

    #[test]
    fn polynomials_match_recursion() {
        let polys = d_polynomials(10);
        for lam in [0.0, 0.3, 1.7] {
            let d = d_sequence(lam, 10).unwrap();
            for k in 0..=10 {
                assert!((horner(&polys[k], lam) - d[k]).abs() <= 1e-12 * d[k]);
            }
        }
    }

    #[test]
    fn g_matches_dense_inversion() {
        for l in 2..=15 {
            for lam in [1e-4, 0.01, 0.2, 0.8, 1.6, 3.2] {
                let a = g_l(l, lam, 3.0).unwrap();
                let b = dense_g(l, lam, 3.0);
                assert!((a - b).abs() < 1e-9, "L={l} lam={lam}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn g_at_zero_and_continuity() {
        assert_eq!(g_l(2, 0.0, 3.0).unwrap(), 7.0);
        for l in 2..=20 {
            let at0 = g_l(l, 0.0, 3.0).unwrap();
            assert!((g_l(l, 1e-12, 3.0).unwrap() - at0).abs() < 1e-9);
        }
    }

    #[test]
    fn g_is_nondecreasing() {
        for l in [2, 3, 5, 10, 15] {
            let vals: Vec<f64> = (0..=200)
                .map(|i| g_l(l, i as f64 * 0.01, 3.0).unwrap())
                .collect();
            assert!(vals.windows(2).all(|p| p[1] >= p[0] - 1e-12), "L={l}");
        }
    }

    #[test]
    fn bounds_collapse_at_zero() {
        for l in 2..10 {
            let b = minimax_bounds(l, 0.0, 3.0).unwrap();
            assert_eq!(b.lower, b.upper_ols);
            assert_eq!(b.lower, b.upper_gls);
        }
        let b = minimax_bounds(2, 0.3, 3.0).unwrap();
        assert!((b.upper_ols - (7.0 + 8.0 * 0.3)).abs() < 1e-12);
        assert!(b.lower <= b.upper() + 1e-12);
    }

    #[test]
    fn curves_csv_header() {
        let rows = bound_curves(&[3], 0.5, 2, 3.0).unwrap();
        let mut buf = Vec::new();
        write_bound_curves_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("L,w,lower,upper_ols,upper_gls\n"));
        assert_eq!(text.lines().count(), 4);
    }
}

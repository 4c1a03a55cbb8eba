//! Quadratic estimators `X^T A X` with symmetric `A`.

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::regression::ols_intercept_weights;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Row-major `n x n`.
    Dense(Vec<f64>),
    /// First row `r`, with `a_ij = r[(j - i) mod n]` and `r[k] = r[n - k]`.
    Circulant(Vec<f64>),
}

/// A symmetric coefficient matrix defining `sigma2_hat = X^T A X`.
///
/// Dense storage is used for general matrices; circulant matrices can be kept
/// in compressed form (first row only), which is what the equivariant
/// estimators produce.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadEstimator {
    n: usize,
    repr: Repr,
}

impl QuadEstimator {
    /// Dense matrix from row-major data; symmetrised as `(A + A^T) / 2`.
    pub fn dense(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::input(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("matrix entries must be finite"));
        }
        let mut sym = data;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (sym[i * n + j] + sym[j * n + i]);
                sym[i * n + j] = avg;
                sym[j * n + i] = avg;
            }
        }
        Ok(Self {
            n,
            repr: Repr::Dense(sym),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::input("matrix must be square"));
        }
        Self::dense(n, rows.iter().flatten().copied().collect())
    }

    /// Circulant matrix from its first row; symmetrised so that
    /// `r[k] = r[n - k]`.
    pub fn circulant(first_row: Vec<f64>) -> Result<Self> {
        let n = first_row.len();
        if n == 0 || first_row.iter().any(|v| !v.is_finite()) {
            return Err(Error::input(
                "circulant first row must be non-empty and finite",
            ));
        }
        let r: Vec<f64> = (0..n)
            .map(|k| 0.5 * (first_row[k] + first_row[(n - k) % n]))
            .collect();
        Ok(Self {
            n,
            repr: Repr::Circulant(r),
        })
    }

    /// `A_k = (1/n)(I - C_k/2 - C_k^T/2)`, so that `X^T A_k X = T_k / (2n)`.
    pub fn lag_basis(n: usize, k: usize) -> Result<Self> {
        Self::from_coefficients(n, &{
            let mut c = vec![0.0; k];
            c[k - 1] = 1.0;
            c
        })
    }

    /// `sum_k c_k A_k`, the matrix of `sum_k c_k Y_k`.
    pub fn from_coefficients(n: usize, c: &[f64]) -> Result<Self> {
        if c.is_empty() || c.len() >= n {
            return Err(Error::domain(format!(
                "need 1 <= len(c) < n, got len(c) = {} with n = {n}",
                c.len()
            )));
        }
        let nf = n as f64;
        let mut r = vec![0.0; n];
        for (idx, &ck) in c.iter().enumerate() {
            let k = idx + 1;
            r[0] += ck / nf;
            r[k % n] -= ck / (2.0 * nf);
            r[(n - k) % n] -= ck / (2.0 * nf);
        }
        Ok(Self {
            n,
            repr: Repr::Circulant(r),
        })
    }

    /// Matrix of the OLS estimator on circular lag statistics with `K` lags.
    pub fn eve(n: usize, k: usize) -> Result<Self> {
        Self::from_coefficients(n, &ols_intercept_weights(k)?)
    }

    /// Matrix of `sum_k w_k S_k / (2n)`, built term by term from
    /// `S_k = sum_{i=1}^{n-k} (X_i - X_{i+k})^2`.
    pub fn linear_lag_combination(n: usize, weights: &[f64]) -> Result<Self> {
        if weights.is_empty() || weights.len() >= n {
            return Err(Error::domain("need 1 <= number of lags < n"));
        }
        let mut a = vec![0.0; n * n];
        let scale = 1.0 / (2.0 * n as f64);
        for (idx, &wk) in weights.iter().enumerate() {
            let k = idx + 1;
            let w = wk * scale;
            for i in 0..(n - k) {
                let j = i + k;
                a[i * n + i] += w;
                a[j * n + j] += w;
                a[i * n + j] -= w;
                a[j * n + i] -= w;
            }
        }
        Self::dense(n, a)
    }

    /// Matrix of the OLS estimator on linear lag statistics with `K` lags.
    pub fn ms(n: usize, k: usize) -> Result<Self> {
        Self::linear_lag_combination(n, &ols_intercept_weights(k)?)
    }

    /// Matrix of `S_1 / (2n)`.
    pub fn rice(n: usize) -> Result<Self> {
        Self::linear_lag_combination(n, &[1.0])
    }

    pub fn scaled_identity(n: usize, s: f64) -> Result<Self> {
        let mut r = vec![0.0; n];
        r[0] = s;
        Self::circulant(r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_compressed_circulant(&self) -> bool {
        matches!(self.repr, Repr::Circulant(_))
    }

    /// First row when stored in compressed circulant form.
    pub fn circulant_row(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Circulant(r) => Some(r),
            Repr::Dense(_) => None,
        }
    }

    /// Entry `a_ij`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.at(i - 1, j - 1)
    }

    /// Entry by 0-based position.
    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> f64 {
        match &self.repr {
            Repr::Dense(a) => a[i * self.n + j],
            Repr::Circulant(r) => r[(j + self.n - i) % self.n],
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Dense(a) => a.clone(),
            Repr::Circulant(_) => {
                let n = self.n;
                (0..n * n).map(|p| self.at(p / n, p % n)).collect()
            }
        }
    }

    pub fn into_dense(self) -> Self {
        let n = self.n;
        Self {
            n,
            repr: Repr::Dense(self.to_dense()),
        }
    }

    pub fn trace(&self) -> f64 {
        compensated_sum((0..self.n).map(|i| self.at(i, i)))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.at(i, i)).collect()
    }

    /// `tr(A^2) = sum_ij a_ij^2` for symmetric `A`.
    pub fn trace_of_square(&self) -> f64 {
        match &self.repr {
            Repr::Dense(a) => compensated_sum(a.iter().map(|v| v * v)),
            Repr::Circulant(r) => self.n as f64 * compensated_sum(r.iter().map(|v| v * v)),
        }
    }

    pub fn max_abs(&self) -> f64 {
        let data = match &self.repr {
            Repr::Dense(a) => a,
            Repr::Circulant(r) => r,
        };
        data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `A v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n, "dimension mismatch");
        let n = self.n;
        match &self.repr {
            Repr::Dense(a) => (0..n)
                .map(|i| compensated_sum((0..n).map(|j| a[i * n + j] * v[j])))
                .collect(),
            Repr::Circulant(r) => {
                let support: Vec<usize> = (0..n).filter(|&k| r[k] != 0.0).collect();
                (0..n)
                    .map(|i| compensated_sum(support.iter().map(|&k| r[k] * v[(i + k) % n])))
                    .collect()
            }
        }
    }

    /// `v^T A v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let av = self.apply(v);
        compensated_sum(av.iter().zip(v).map(|(a, b)| a * b))
    }
}

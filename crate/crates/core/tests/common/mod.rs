#![allow(dead_code)]

use rand::Rng;

/// Piecewise-constant values of length `n` with `segments` pieces, each at
/// least `min_len` long; levels are drawn independently so neighbours
/// (including across the seam) differ almost surely.
pub fn random_levels<R: Rng>(
    rng: &mut R,
    n: usize,
    segments: usize,
    min_len: usize,
    scale: f64,
) -> Vec<f64> {
    assert!(segments * min_len <= n);
    let mut lengths = vec![min_len; segments];
    for _ in 0..(n - segments * min_len) {
        let j = rng.random_range(0..segments);
        lengths[j] += 1;
    }
    let mut out = Vec::with_capacity(n);
    for len in lengths {
        let level = rng.random_range(-scale..scale);
        out.extend(std::iter::repeat_n(level, len));
    }
    out
}

/// Random `c` in `Q_L`: an arbitrary vector projected onto the affine set
/// `sum c = 1`, `sum k c_k = 0`.
pub fn random_ql<R: Rng>(rng: &mut R, l: usize) -> Vec<f64> {
    let u: Vec<f64> = (0..l).map(|_| rng.random_range(-3.0..3.0)).collect();
    let k: Vec<f64> = (1..=l).map(|k| k as f64).collect();
    // Gram matrix of the constraint vectors (1, k)
    let s0 = l as f64;
    let s1: f64 = k.iter().sum();
    let s2: f64 = k.iter().map(|v| v * v).sum();
    let r0 = u.iter().sum::<f64>() - 1.0;
    let r1: f64 = u.iter().zip(&k).map(|(a, b)| a * b).sum();
    let det = s0 * s2 - s1 * s1;
    let a = (s2 * r0 - s1 * r1) / det;
    let b = (s0 * r1 - s1 * r0) / det;
    u.iter().zip(&k).map(|(v, kk)| v - a - b * kk).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

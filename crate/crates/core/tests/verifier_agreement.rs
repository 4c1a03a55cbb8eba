mod common;

use common::{random_levels, random_ql};
use eve_core::par::Execution;
use eve_core::verifier::{
    circular_report, classical_report, is_equivariant, is_unbiased_circular, is_unbiased_classical,
    verify, Tolerance,
};
use eve_core::QuadEstimator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A mix of matrices that are and are not unbiased over classical profiles.
fn random_matrix(rng: &mut ChaCha8Rng, n: usize, l: usize) -> QuadEstimator {
    match rng.random_range(0..4) {
        // linear-lag combination with constrained weights: unbiased
        0 => QuadEstimator::linear_lag_combination(n, &random_ql(rng, l)).unwrap(),
        // equivariant and unbiased
        1 => QuadEstimator::from_coefficients(n, &random_ql(rng, l))
            .unwrap()
            .into_dense(),
        // unbiased matrix with a few symmetric entries disturbed
        2 => {
            let base = QuadEstimator::linear_lag_combination(n, &random_ql(rng, l)).unwrap();
            let mut a = base.to_dense();
            for _ in 0..rng.random_range(1..4) {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                let e = rng.random_range(-0.05..0.05);
                a[i * n + j] += e;
                a[j * n + i] += e;
            }
            QuadEstimator::dense(n, a).unwrap()
        }
        // unconstrained
        _ => QuadEstimator::dense(n, (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .unwrap(),
    }
}

#[test]
fn enumeration_and_nine_conditions_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut holds = 0;
    let mut fails = 0;
    for (n, l) in [(16, 3), (16, 4), (24, 3), (24, 4), (32, 3), (32, 4)] {
        for _ in 0..34 {
            let a = random_matrix(&mut rng, n, l);
            let v = is_unbiased_classical(&a, l).unwrap();
            assert_eq!(
                v.by_enumeration, v.by_c1_to_c9,
                "n={n}, L={l}, failed {:?}",
                v.failed_conditions
            );
            if v.by_enumeration {
                holds += 1;
            } else {
                fails += 1;
            }
        }
    }
    assert!(holds >= 50 && fails >= 50, "holds {holds}, fails {fails}");
}

fn bias(a: &QuadEstimator, theta: &[f64]) -> f64 {
    a.quadratic_form(theta)
}

#[test]
fn circular_predicate_means_zero_bias() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (n, l) in [(24, 3), (40, 5)] {
        let good = QuadEstimator::from_coefficients(n, &random_ql(&mut rng, l)).unwrap();
        assert!(is_unbiased_circular(&good, l).unwrap());
        let bad = QuadEstimator::scaled_identity(n, 1.0 / n as f64).unwrap();
        assert!(!is_unbiased_circular(&bad, l).unwrap());
        let mut worst_bad: f64 = 0.0;
        for _ in 0..500 {
            let segments = rng.random_range(1..=n / l);
            let mut theta = random_levels(&mut rng, n, segments, l, 3.0);
            theta.rotate_right(rng.random_range(0..n));
            let norm: f64 = theta.iter().map(|v| v * v).sum();
            assert!(bias(&good, &theta).abs() <= 1e-9 * norm.max(1.0));
            worst_bad = worst_bad.max(bias(&bad, &theta).abs() / norm.max(1.0));
        }
        assert!(worst_bad > 1e-3);
    }
}

#[test]
fn classical_predicate_means_zero_bias() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (n, l) = (32, 4);
    let mut checked = 0;
    for _ in 0..60 {
        let a = random_matrix(&mut rng, n, l);
        let verdict = classical_report(&a, l, Tolerance::Standard, Execution::default()).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..500 {
            let segments = rng.random_range(1..=n / l);
            let theta = random_levels(&mut rng, n, segments, l, 3.0);
            let norm: f64 = theta.iter().map(|v| v * v).sum();
            worst = worst.max(bias(&a, &theta).abs() / norm.max(1.0));
        }
        if verdict.holds {
            checked += 1;
            assert!(
                worst <= 1e-9,
                "bias {worst} for a matrix the predicate accepts"
            );
        } else if (verdict.trace - 1.0).abs() < 1e-9 {
            assert!(
                worst > 1e-9,
                "predicate rejects but no biased profile found"
            );
        }
    }
    assert!(checked > 10);
}

#[test]
fn exact_mode_agrees_on_dyadic_matrices() {
    // K = 4 weights are (1, 1/2, 0, -1/2), so every entry is dyadic for n = 16
    let a = QuadEstimator::eve(16, 4).unwrap();
    for l in [4, 5, 8] {
        let exact = circular_report(&a, l, Tolerance::Exact, Execution::default()).unwrap();
        let float = circular_report(&a, l, Tolerance::Standard, Execution::default()).unwrap();
        assert_eq!(exact.holds, float.holds, "L={l}");
        assert!(exact.holds);
    }
    let c = circular_report(&a, 3, Tolerance::Exact, Execution::default()).unwrap();
    assert!(!c.holds);
    let ms = QuadEstimator::ms(16, 4).unwrap();
    let e = classical_report(&ms, 4, Tolerance::Exact, Execution::default()).unwrap();
    assert!(e.holds);
    let v = verify(&ms, 4, None, Tolerance::Exact, Execution::Sequential).unwrap();
    assert!(v.classical_conditions.unwrap().by_c1_to_c9);
}

#[test]
fn equivariance_detects_circulants() {
    let a = QuadEstimator::eve(20, 5).unwrap();
    assert!(is_equivariant(&a, Tolerance::Standard));
    assert!(is_equivariant(&a.clone().into_dense(), Tolerance::Standard));
    assert!(!is_equivariant(
        &QuadEstimator::ms(20, 5).unwrap(),
        Tolerance::Standard
    ));
}

#[test]
fn sequential_and_parallel_verdicts_match() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10 {
        let a = random_matrix(&mut rng, 24, 3);
        let s = verify(&a, 3, None, Tolerance::Standard, Execution::Sequential).unwrap();
        let p = verify(&a, 3, None, Tolerance::Standard, Execution::Parallel).unwrap();
        assert_eq!(s, p);
    }
}

#[test]
fn large_dense_matrix_is_verified_quickly() {
    let a = QuadEstimator::ms(512, 10).unwrap();
    let start = std::time::Instant::now();
    let v = verify(&a, 10, None, Tolerance::Standard, Execution::default()).unwrap();
    assert!(v.unbiased_classical.unwrap().holds);
    assert!(!v.unbiased_circular.unwrap().holds);
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

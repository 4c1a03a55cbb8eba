mod common;

use common::{random_levels, random_ql, rel};
use eve_core::estimators::{eve_ols, gls, ms_ols};
use eve_core::par::{map_indexed, Execution};
use eve_core::regression::ols_intercept_weights;
use eve_core::risk::{
    d_sequence, g_l, ms_risk, ols_risk, optimal_c, quad_risk, risk_of_c, CoefVector,
    MsSampleSizeTerm,
};
use eve_core::sim::{sample_noise, NoiseKind};
use eve_core::{CircularSeries, MeanProfile, NoiseMoments, QuadEstimator};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn noise(kappa: f64, symmetric: bool) -> NoiseMoments {
    NoiseMoments::new(1.0, kappa, symmetric).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn three_paths_agree_for_the_ols_estimator(
        seed in any::<u64>(),
        k in 2usize..=6,
        segments in 2usize..=5,
        kappa_idx in 0usize..3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = segments * 2 * k + 17;
        let theta = MeanProfile::from_values(random_levels(&mut rng, n, segments, 2 * k, 2.0)).unwrap();
        prop_assume!(theta.min_segment_len() >= 2 * k);
        let nm = [noise(3.0, true), noise(6.0, true), noise(9.0, false)][kappa_idx];
        let a = QuadEstimator::eve(n, k).unwrap();
        let by_matrix = quad_risk(&a, &theta, &nm).unwrap();
        let by_formula = ols_risk(k, n, &nm, theta.w() / n as f64, true).unwrap().risk;
        let c = CoefVector::new(ols_intercept_weights(k).unwrap()).unwrap();
        let by_coef = risk_of_c(&c, &theta, &nm).unwrap();
        prop_assert!(rel(by_matrix, by_formula) <= 1e-8, "{by_matrix} vs {by_formula}");
        prop_assert!(rel(by_coef, by_formula) <= 1e-8, "{by_coef} vs {by_formula}");
    }

    #[test]
    fn linear_lag_formula_matches_matrix(
        seed in any::<u64>(),
        k in 2usize..=6,
        segments in 2usize..=5,
        kurtic in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = segments * 2 * k + 9;
        let theta = MeanProfile::classical_from_values(random_levels(&mut rng, n, segments, 2 * k, 2.0)).unwrap();
        prop_assume!(theta.min_segment_len() >= 2 * k);
        let nm = noise(if kurtic { 6.0 } else { 3.0 }, true);
        let by_matrix = quad_risk(&QuadEstimator::ms(n, k).unwrap(), &theta, &nm).unwrap();
        let by_formula = ms_risk(k, n, &nm, theta.v() / n as f64, true, MsSampleSizeTerm::Derived)
            .unwrap()
            .risk;
        prop_assert!(rel(by_matrix, by_formula) <= 1e-8, "{by_matrix} vs {by_formula}");
    }

    #[test]
    fn coefficient_risk_matches_matrix_and_respects_floor(
        seed in any::<u64>(),
        l in 2usize..=6,
        segments in 2usize..=6,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = segments * l + 5;
        let theta = MeanProfile::from_values(random_levels(&mut rng, n, segments, l, 3.0)).unwrap();
        prop_assume!(theta.min_segment_len() >= l);
        let c = random_ql(&mut rng, l);
        let cv = CoefVector::new(c.clone()).unwrap();
        for nm in [noise(3.0, true), noise(9.0, false)] {
            let by_coef = risk_of_c(&cv, &theta, &nm).unwrap();
            let a = QuadEstimator::from_coefficients(n, &c).unwrap();
            let by_matrix = quad_risk(&a, &theta, &nm).unwrap();
            prop_assert!(rel(by_coef, by_matrix) <= 1e-8, "{by_coef} vs {by_matrix}");
            prop_assert!(by_coef >= nm.kappa4() - 1.0 - 1e-10);
        }
    }

    #[test]
    fn ols_bound_dominates_exact_risk(
        seed in any::<u64>(),
        k in 2usize..=6,
        segments in 2usize..=8,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = segments * k + 3;
        let theta = MeanProfile::from_values(random_levels(&mut rng, n, segments, k, 2.0)).unwrap();
        prop_assume!(theta.min_segment_len() >= k && 2 * k <= n);
        let nm = noise(3.0, true);
        let exact = quad_risk(&QuadEstimator::eve(n, k).unwrap(), &theta, &nm).unwrap();
        let bound = ols_risk(k, n, &nm, theta.w() / n as f64, false).unwrap().risk;
        prop_assert!(exact <= bound * (1.0 + 1e-10), "{exact} > {bound}");
    }

    #[test]
    fn determinants_stay_positive(lambda in 0.0f64..50.0, l in 1usize..=40) {
        let d = d_sequence(lambda, l).unwrap();
        prop_assert!(d.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn minimax_curve_increases(l in 2usize..=20, a in 0.0f64..2.0, b in 0.0f64..2.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6);
        prop_assert!(g_l(l, lo, 3.0).unwrap() <= g_l(l, hi, 3.0).unwrap() + 1e-12);
    }
}

/// `n E(sigma2_hat - 1)^2` and its Monte Carlo standard error.
fn monte_carlo_risk(
    theta: &MeanProfile,
    kind: &NoiseKind,
    reps: usize,
    seed: u64,
    est: impl Fn(&CircularSeries) -> f64 + Sync,
) -> (f64, f64) {
    let n = theta.n();
    let z = map_indexed(reps, Execution::default(), |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let eps = sample_noise(kind, n, &mut rng);
        let x: Vec<f64> = theta
            .values()
            .iter()
            .zip(&eps)
            .map(|(t, e)| t + e)
            .collect();
        let s2 = est(&CircularSeries::new(x).unwrap());
        n as f64 * (s2 - 1.0).powi(2)
    });
    let m = z.iter().sum::<f64>() / reps as f64;
    let var = z.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
    (m, (var / reps as f64).sqrt())
}

const REPS: usize = 100_000;

#[test]
fn ols_risk_by_monte_carlo() {
    let cases = [
        (
            MeanProfile::constant(60, 0.0).unwrap(),
            NoiseKind::Gaussian,
            5,
        ),
        (
            MeanProfile::alternating_blocks(80, 10, 1.0).unwrap(),
            NoiseKind::Gaussian,
            4,
        ),
        (
            MeanProfile::alternating_blocks(80, 10, 0.5).unwrap(),
            NoiseKind::ExpShifted,
            5,
        ),
    ];
    for (i, (theta, kind, k)) in cases.into_iter().enumerate() {
        let n = theta.n();
        let formula = ols_risk(k, n, &kind.moments(), theta.w() / n as f64, true)
            .unwrap()
            .risk;
        let (mc, se) = monte_carlo_risk(&theta, &kind, REPS, 11 + i as u64, |x| {
            eve_ols(x, k).unwrap().sigma2_hat
        });
        assert!(
            (mc - formula).abs() <= 4.0 * se,
            "case {i}: {mc} +/- {se} vs {formula}"
        );
    }
}

#[test]
fn linear_lag_risk_by_monte_carlo() {
    let blocks = |n: usize, len: usize, amp: f64| {
        let v = MeanProfile::alternating_blocks(n, len, amp)
            .unwrap()
            .values()
            .to_vec();
        MeanProfile::classical_from_values(v).unwrap()
    };
    let mut shifted: Vec<f64> = blocks(90, 15, 1.0).values().to_vec();
    for v in shifted.iter_mut().skip(75) {
        *v = 2.0;
    }
    let cases = [
        (
            MeanProfile::classical_from_values(vec![0.0; 60]).unwrap(),
            5,
        ),
        (blocks(80, 10, 1.0), 4),
        (MeanProfile::classical_from_values(shifted).unwrap(), 6),
    ];
    let kind = NoiseKind::Gaussian;
    for (i, (theta, k)) in cases.into_iter().enumerate() {
        let n = theta.n();
        let formula = ms_risk(
            k,
            n,
            &kind.moments(),
            theta.v() / n as f64,
            true,
            Default::default(),
        )
        .unwrap()
        .risk;
        let (mc, se) = monte_carlo_risk(&theta, &kind, REPS, 21 + i as u64, |x| {
            ms_ols(x, k).unwrap().sigma2_hat
        });
        assert!(
            (mc - formula).abs() <= 4.0 * se,
            "case {i}: {mc} +/- {se} vs {formula}"
        );
    }
}

#[test]
fn coefficient_risk_by_monte_carlo() {
    let cases = [
        (
            MeanProfile::constant(50, 1.0).unwrap(),
            NoiseKind::Gaussian,
            3,
            0.0,
        ),
        (
            MeanProfile::alternating_blocks(80, 8, 1.0).unwrap(),
            NoiseKind::Gaussian,
            4,
            0.2,
        ),
        (
            MeanProfile::alternating_blocks(96, 12, 0.7).unwrap(),
            NoiseKind::ExpShifted,
            6,
            0.05,
        ),
    ];
    for (i, (theta, kind, l, w)) in cases.into_iter().enumerate() {
        let c = optimal_c(l, w).unwrap();
        let formula = risk_of_c(&c, &theta, &kind.moments()).unwrap();
        let (mc, se) = monte_carlo_risk(&theta, &kind, REPS, 31 + i as u64, |x| {
            gls(x, l, w).unwrap().sigma2_hat
        });
        assert!(
            (mc - formula).abs() <= 4.0 * se,
            "case {i}: {mc} +/- {se} vs {formula}"
        );
    }
}

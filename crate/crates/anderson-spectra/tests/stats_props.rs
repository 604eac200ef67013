//! Cross-estimator invariants: the window-event estimators share per-trial
//! seeds, so their set-inclusion relations must hold exactly, not just in
//! expectation. Plus end-to-end smoke on the rescaled point process.

mod common;

use anderson_spectra::stats::{
    expected_trace, localization_partition, minami_probability, poisson_tests,
    rescaled_samples, wegner_probability, PoissonTestConfig,
};
use anderson_spectra::stats::independent_pairs;
use proptest::prelude::*;

/// P[at least one] ≥ P[at least two] and E[count] ≥ P[at least one], as
/// exact per-seed statements (same trials, same seeds, same windows).
#[test]
fn window_event_inclusions_are_exact() {
    for seed in [0u64, 1, 2, 17, 991] {
        for (n, delta) in [(50usize, 0.05f64), (100, 0.02), (200, 0.01)] {
            let trials = 2_000u64;
            let w = wegner_probability(0.5, delta, n, 0.5, trials, seed).unwrap();
            let m = minami_probability(0.5, delta, n, 0.5, trials, 10.0, seed).unwrap();
            let t = expected_trace(0.5, delta, n, 0.5, trials, 0.16, 10.0, seed).unwrap();
            assert!(
                w.estimate.successes >= m.estimate.successes,
                "seed {seed}, N={n}, delta={delta}: wegner {} < minami {}",
                w.estimate.successes,
                m.estimate.successes
            );
            assert!(
                t.mean >= w.estimate.probability,
                "seed {seed}, N={n}, delta={delta}: trace mean {} < wegner {}",
                t.mean,
                w.estimate.probability
            );
        }
    }
}

/// The rescaled point process machinery end to end at desk scale: correct
/// sample counts, points inside [0, L], sorted, and a battery whose summary
/// statistics are sane (no p-value asserts at this tiny scale).
#[test]
fn rescaled_battery_runs_end_to_end() {
    let samples = rescaled_samples(0.5, 300, 0.5, 8.0, 600, 33).unwrap();
    assert_eq!(samples.len(), 600);
    for s in &samples {
        assert!(s.points.windows(2).all(|w| w[0] <= w[1]));
        assert!(s.points.iter().all(|p| (0.0..=8.0).contains(p)));
    }
    let battery = poisson_tests(&samples, &PoissonTestConfig::default()).unwrap();
    assert_eq!(battery.trials, 600);
    assert!(battery.mean_count > 0.2, "mean {}", battery.mean_count);
    assert!(battery.counts.bins >= 2);
    assert!(battery.gaps.n_gaps > 0);
    // Bootstrap and asymptotic gap p-values are both present and in [0, 1].
    for p in [battery.gaps.p_bootstrap, battery.gaps.p_asymptotic] {
        let p = p.expect("gap test ran");
        assert!((0.0..=1.0).contains(&p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Partition windows tile [1, n]: right length, full coverage, within
    /// the count budget, and declared independent pairs really are disjoint
    /// with a one-site gap.
    #[test]
    fn partition_tiles_and_pairs_are_disjoint(n in 1usize..400, m_frac in 0.01f64..1.0) {
        let m = ((n as f64 * m_frac).ceil() as usize).clamp(1, n);
        let windows = localization_partition(n, m).unwrap();
        prop_assert_eq!(windows.first().copied(), Some((1, m)));
        prop_assert_eq!(windows.last().copied(), Some((n - m + 1, n)));
        prop_assert!(windows.len() <= 2 * n.div_ceil(m));
        for w in &windows {
            prop_assert_eq!(w.1 - w.0 + 1, m);
            prop_assert!(w.0 >= 1 && w.1 <= n);
        }
        // Coverage: consecutive starts never skip past the previous end.
        for pair in windows.windows(2) {
            prop_assert!(pair[1].0 <= pair[0].1 + 1);
        }
        for (i, j) in independent_pairs(&windows) {
            let (a, b) = (windows[i], windows[j]);
            prop_assert!(a.1 < b.0 || b.1 < a.0, "pair {:?} {:?} overlaps", a, b);
        }
    }

    /// δ = 0 windows short-circuit to zero for every estimator, regardless
    /// of any other parameter.
    #[test]
    fn zero_width_windows_are_empty_events(
        seed in any::<u64>(),
        e0 in -1.5f64..1.5,
        n in 16usize..200,
    ) {
        let w = wegner_probability(e0, 0.0, n, 0.5, 64, seed).unwrap();
        prop_assert_eq!(w.estimate.successes, 0);
        let m = minami_probability(e0, 0.0, n, 0.5, 64, 1.0, seed).unwrap();
        prop_assert_eq!(m.estimate.successes, 0);
        let t = expected_trace(e0, 0.0, n, 0.5, 64, 0.16, 1.0, seed).unwrap();
        prop_assert_eq!(t.mean, 0.0);
    }
}

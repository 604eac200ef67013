//! Local eigenvalue statistics in a microscopic window around E₀: rescaled
//! eigenvalues are tested against a Poisson point process (count law, gap
//! law, independence of half-intervals). Convergence to Poisson requires
//! many localization volumes per window; the example shows the battery at
//! two volumes and the Type-I self-calibration of the tests themselves.
//!
//! Run with: cargo run --release --example poisson_spacings

use anderson_spectra::stats::poisson::{
    calibrate_poisson_battery, poisson_tests, rescaled_samples, CalibrationParams,
    PoissonTestConfig,
};
use anderson_spectra::Result;

fn main() -> Result<()> {
    // k(0.5) ≈ 0.16822 at λ = 0.5 (from the ids_dos example), so L = 5/k
    // gives a window holding ≈ 5 eigenvalues on average.
    let k_at_e0 = 0.16822;
    let l = 5.0 / k_at_e0;
    let config = PoissonTestConfig {
        bootstrap_reps: 500,
        seed: 0,
        k_at_e0: Some(k_at_e0),
    };

    for n in [2000usize, 8000] {
        let samples = rescaled_samples(0.5, n, 0.5, l, 2000, 0)?;
        let battery = poisson_tests(&samples, &config)?;
        println!(
            "N = {n}, λ = 0.5, window [0.5, 0.5 + {:.3}/N], 2000 trials:",
            l
        );
        println!(
            "  mean count  : {:.3} ± {:.3}  (expected {:.3})",
            battery.mean_count,
            battery.mean_count_stderr,
            battery.expected_mean_count.unwrap()
        );
        println!(
            "  count chi²  : {:.1} on {} dof, p = {:.4}",
            battery.counts.statistic,
            battery.counts.dof,
            battery.counts.p_value.unwrap()
        );
        println!(
            "  gap KS      : D = {:.4}, bootstrap p = {:.4} ({} gaps)",
            battery.gaps.statistic.unwrap(),
            battery.gaps.p_bootstrap.unwrap(),
            battery.gaps.n_gaps
        );
        let rho = battery.correlation.rho.unwrap();
        let ci = battery.correlation.ci95.unwrap();
        println!(
            "  half-window correlation: ρ = {rho:+.4}, CI95 [{:+.4}, {:+.4}]",
            ci.0, ci.1
        );
        println!("  rejections at 1%: {:?}\n", battery.rejections(0.01));
        // At N = 2000 the localization length (≈ 31 sites at λ = 0.5) is
        // still large enough relative to the volume that level repulsion
        // shows: counts are under-dispersed and adjacent half-windows
        // anti-correlate. Quadrupling the volume restores Poisson behavior
        // at the same window occupancy.
    }

    // Self-test: on genuinely Poisson synthetic data, each test should
    // reject at about its nominal level.
    let params = CalibrationParams::default();
    let calib = calibrate_poisson_battery(&params)?;
    let (c, g, r) = calib.rates();
    println!(
        "battery calibration on true-Poisson data ({} regenerations at level {}):",
        calib.regenerations, calib.level
    );
    println!("  rejection rates: counts {c:.4}, gaps {g:.4}, correlation {r:.4}");
    println!("  worst rate     : {:.4}", calib.worst_rate());
    Ok(())
}

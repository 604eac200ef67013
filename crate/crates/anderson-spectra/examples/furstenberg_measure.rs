//! Stationary measure of the projective transfer-matrix walk at one
//! (E, λ) point: histogram estimate, stationarity residual, the E ↔ −E
//! mirror symmetry, the window-mass profile τ̂(ε), and the
//! angle-concentration experiment that τ̂ bounds.
//!
//! Run with: cargo run --release --example furstenberg_measure

use anderson_spectra::transfer::{
    angle_concentration, furstenberg_estimate, tau_max_interval, AngleConcentrationConfig,
    FurstenbergEstimate, FurstenbergParams, ProjectiveAngle,
};
use anderson_spectra::Result;

fn main() -> Result<()> {
    let energy = 0.5;
    let lambda = 0.5;
    let params = FurstenbergParams {
        bins: 512,
        burn_in: 1_000,
        steps: 1_000_000,
        seed: 0,
    };

    println!("stationary measure at E = {energy}, lambda = {lambda}");
    println!(
        "  bins = {}, burn-in = {}, steps = {}",
        params.bins, params.burn_in, params.steps
    );
    let est = furstenberg_estimate(energy, lambda, &params)?;
    println!("  stationarity residual  : {:.5}", est.stationarity_residual);

    // Mirror symmetry: the measure at −E is the angle-reversed measure at E.
    let mirror = furstenberg_estimate(-energy, lambda, &params)?;
    let tv = FurstenbergEstimate::tv_distance(&est.mirrored_mass(), &mirror.mass);
    println!(
        "  mirror TV distance     : {:.5}  (residuals {:.5} / {:.5})",
        tv, est.stationarity_residual, mirror.stationarity_residual
    );

    println!("\nwindow-mass profile (largest mass of any angular window of width 2ε):");
    for eps in [0.02, 0.05, 0.1, 0.2, 0.5] {
        println!("  tau({eps:>4}) = {:.5}", tau_max_interval(&est, eps)?);
    }

    // The measure's window mass bounds how often the walk concentrates near
    // a fixed direction: P[|<M_N ξ/|M_N ξ|, η>| < ε] ≲ τ̂(4ε).
    let eps = 0.05;
    let n = 500;
    let trials = 10_000;
    let target = ProjectiveAngle::new(std::f64::consts::FRAC_PI_2);
    let cfg = AngleConcentrationConfig::default();
    let conc = angle_concentration(&est, eps, n, trials, 1, target, &cfg)?;
    println!("\nangle concentration at eps = {eps}, N = {n}, trials = {trials}:");
    println!(
        "  empirical P            : {:.5} ± {:.5}",
        conc.estimate.probability, conc.estimate.stderr
    );
    println!("  tau({:.2})              : {:.5}", conc.tau_eps, conc.tau_hat);
    println!("  bound 4·tau            : {:.5}", conc.bound);
    println!("  within bound           : {}", conc.within_bound);
    Ok(())
}

//! Monte Carlo verification of the probabilistic window estimates —
//! Wegner-type (at least one eigenvalue in a small interval), expected
//! trace, Minami-type (at least two eigenvalues), near-resonance events —
//! plus the window partition used by the localization pipeline.
//!
//! All estimators share the seeding discipline of [`crate::rng`]: every
//! trial gets its own keyed stream, scan cells get their own stage seeds,
//! and reductions are exact integer sums, so outputs are identical for any
//! thread count.

pub mod poisson;

pub use poisson::{
    calibrate_poisson_battery, poisson_tests, rescaled_sample, rescaled_samples,
    synthetic_poisson_samples, CalibrationParams, CountChiSquare, GapKs,
    HalfIntervalCorrelation, PointProcessSample, PoissonBattery, PoissonCalibration,
    PoissonTestConfig,
};

use serde::Serialize;

use crate::error::Error;
use crate::mc::{self, BinomialEstimate, LineFit};
use crate::model::{build_hamiltonian, sample_potential, TridiagonalHamiltonian};
use crate::rng::{seed_for_trial, stage_seed};
use crate::spectrum::{eigen_window, sturm_count};
use crate::Result;

/// Interior margin δ₀ of the admissible energy band `[−2+δ₀, 2−δ₀]` that
/// the window-statistics preconditions refer to.
pub const BAND_MARGIN: f64 = 0.1;

/// Default constant in the `log(1/δ) < c·N` trace precondition.
pub const DEFAULT_TRACE_C: f64 = 1.0;

/// Default constant in the `log(1/δ) < c·√N` Minami precondition.
pub const DEFAULT_MINAMI_C: f64 = 1.0;

/// Whether `[lo, hi]` lies inside the admissible band `[−2+δ₀, 2−δ₀]`.
pub fn in_admissible_band(lo: f64, hi: f64) -> bool {
    lo >= -2.0 + BAND_MARGIN && hi <= 2.0 - BAND_MARGIN
}

/// One cell of a window-statistics scan: empirical event probability at a
/// fixed `(N, δ)`.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingCell {
    pub n: usize,
    pub delta: f64,
    pub estimate: BinomialEstimate,
    /// Soft record of the admissible-band check for this window.
    pub in_band: bool,
}

/// A δ-sweep of a window statistic with its log-log slope fit.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingExperiment {
    pub cells: Vec<ScalingCell>,
    /// Weighted least-squares fit of `ln p̂` against `ln δ` (binomial
    /// error weights); `None` when fewer than two cells had successes.
    pub fit: Option<LineFit>,
    /// Cells with zero successes, dropped from the fit and reported.
    pub dropped_zero_cells: usize,
}

fn validate_window_args(e0: f64, delta: f64, n: usize, lambda: f64, trials: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSize("matrix size must be >= 1".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidSize("need at least 1 trial".into()));
    }
    if !e0.is_finite() || !lambda.is_finite() {
        return Err(Error::NonFinite("window statistic parameter"));
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidWindow(format!(
            "window half-width must be finite and >= 0, got {delta}"
        )));
    }
    Ok(())
}

/// Exact per-scan tallies of the eigenvalue count in `[E₀−δ, E₀+δ)`:
/// number of trials with ≥1 eigenvalue, with ≥2 eigenvalues, and the sum /
/// sum-of-squares of the count itself.
struct WindowTally {
    at_least_one: u64,
    at_least_two: u64,
    sum: u64,
    sumsq: u128,
}

fn window_tally(e0: f64, delta: f64, n: usize, lambda: f64, trials: u64, seed: u64) -> WindowTally {
    let per_trial: Vec<u32> = mc::run_trials(trials, |t| {
        let pot = sample_potential(n, seed_for_trial(seed, t)).expect("n >= 1");
        let h = build_hamiltonian(&pot, lambda, (1, n)).expect("interval valid");
        (sturm_count(&h, e0 + delta) - sturm_count(&h, e0 - delta)) as u32
    });
    let mut tally = WindowTally {
        at_least_one: 0,
        at_least_two: 0,
        sum: 0,
        sumsq: 0,
    };
    for c in per_trial {
        if c >= 1 {
            tally.at_least_one += 1;
        }
        if c >= 2 {
            tally.at_least_two += 1;
        }
        tally.sum += u64::from(c);
        tally.sumsq += u128::from(c) * u128::from(c);
    }
    tally
}

/// Empirical probability that `H_N` has at least one eigenvalue in
/// `[E₀−δ, E₀+δ)` — the event of the Wegner-type estimate, detected as
/// `sturm_count(E₀+δ) > sturm_count(E₀−δ)`.
///
/// The admissible-band condition is reported in `in_band` rather than
/// enforced: out-of-band windows (e.g. one spanning the whole spectrum,
/// where the probability is exactly 1) are legitimate sanity inputs, and
/// the upper-bound direction of the estimate is unaffected.
pub fn wegner_probability(
    e0: f64,
    delta: f64,
    n: usize,
    lambda: f64,
    trials: u64,
    seed: u64,
) -> Result<ScalingCell> {
    validate_window_args(e0, delta, n, lambda, trials)?;
    let tally = window_tally(e0, delta, n, lambda, trials, seed);
    Ok(ScalingCell {
        n,
        delta,
        estimate: BinomialEstimate::from_counts(tally.at_least_one, trials),
        in_band: in_admissible_band(e0 - delta, e0 + delta),
    })
}

/// Empirical probability that `H_N` has at least **two** eigenvalues in
/// `[E₀−δ, E₀+δ)` — the event of the Minami-type estimate.
///
/// Preconditions (refused with [`Error::Precondition`] when violated, as
/// the estimate's error terms are not controlled outside them):
/// the window must lie in the admissible band and `log(1/δ) < c·√N`.
/// `δ = 0` short-circuits to probability 0 (simple spectrum) before any
/// precondition check.
pub fn minami_probability(
    e0: f64,
    delta: f64,
    n: usize,
    lambda: f64,
    trials: u64,
    c_cfg: f64,
    seed: u64,
) -> Result<ScalingCell> {
    validate_window_args(e0, delta, n, lambda, trials)?;
    if delta == 0.0 {
        return Ok(ScalingCell {
            n,
            delta,
            estimate: BinomialEstimate::from_counts(0, trials),
            in_band: in_admissible_band(e0, e0),
        });
    }
    if !in_admissible_band(e0 - delta, e0 + delta) {
        return Err(Error::Precondition(format!(
            "window [{}, {}] leaves the admissible band [{}, {}]",
            e0 - delta,
            e0 + delta,
            -2.0 + BAND_MARGIN,
            2.0 - BAND_MARGIN
        )));
    }
    let log_inv_delta = (1.0 / delta).ln();
    let bound = c_cfg * (n as f64).sqrt();
    if log_inv_delta >= bound {
        return Err(Error::Precondition(format!(
            "log(1/delta) = {log_inv_delta:.3} must stay below c*sqrt(N) = {bound:.3}"
        )));
    }
    let tally = window_tally(e0, delta, n, lambda, trials, seed);
    Ok(ScalingCell {
        n,
        delta,
        estimate: BinomialEstimate::from_counts(tally.at_least_two, trials),
        in_band: true,
    })
}

/// Mean eigenvalue count in `[E₀−δ, E₀+δ)` compared with the density-of-
/// states prediction `N·k(E₀)·2δ`.
#[derive(Debug, Clone, Serialize)]
pub struct TraceResult {
    pub n: usize,
    pub delta: f64,
    pub mean: f64,
    pub stderr: f64,
    /// `N·k(E₀)·2δ` with the caller-supplied `k(E₀)`.
    pub prediction: f64,
    /// Normalized discrepancy `(mean − prediction)/prediction`;
    /// `None` when the prediction is zero.
    pub discrepancy: Option<f64>,
    pub trials: u64,
}

/// Mean number of eigenvalues of `H_N` in `[E₀−δ, E₀+δ)` over disorder,
/// with the comparison `N·k(E₀)·2δ` (`k_at_e0` comes from
/// [`crate::spectrum::ids_dos`]).
///
/// Refused when `log(1/δ) ≥ c_cfg·N` (the regime where the estimate's
/// error term is uncontrolled). `δ = 0` short-circuits to mean 0 before
/// that check.
pub fn expected_trace(
    e0: f64,
    delta: f64,
    n: usize,
    lambda: f64,
    trials: u64,
    k_at_e0: f64,
    c_cfg: f64,
    seed: u64,
) -> Result<TraceResult> {
    validate_window_args(e0, delta, n, lambda, trials)?;
    if !(k_at_e0.is_finite() && k_at_e0 >= 0.0) {
        return Err(Error::NonFinite("k(E0) density value"));
    }
    if delta == 0.0 {
        return Ok(TraceResult {
            n,
            delta,
            mean: 0.0,
            stderr: 0.0,
            prediction: 0.0,
            discrepancy: None,
            trials,
        });
    }
    if trials < 2 {
        return Err(Error::InvalidSize("need at least 2 trials".into()));
    }
    let log_inv_delta = (1.0 / delta).ln();
    if log_inv_delta >= c_cfg * n as f64 {
        return Err(Error::Precondition(format!(
            "log(1/delta) = {log_inv_delta:.3} must stay below c*N = {:.3}",
            c_cfg * n as f64
        )));
    }
    let tally = window_tally(e0, delta, n, lambda, trials, seed);
    let t = trials as f64;
    let mean = tally.sum as f64 / t;
    let var = ((tally.sumsq as f64) - (tally.sum as f64) * mean) / (t - 1.0);
    let stderr = (var.max(0.0) / t).sqrt();
    let prediction = n as f64 * k_at_e0 * 2.0 * delta;
    let discrepancy = if prediction > 0.0 {
        Some((mean - prediction) / prediction)
    } else {
        None
    };
    Ok(TraceResult {
        n,
        delta,
        mean,
        stderr,
        prediction,
        discrepancy,
        trials,
    })
}

fn validate_delta_grid(deltas: &[f64]) -> Result<()> {
    if deltas.len() < 2 {
        return Err(Error::InvalidSize("delta sweep needs >= 2 cells".into()));
    }
    if deltas.iter().any(|d| !d.is_finite() || *d <= 0.0) {
        return Err(Error::InvalidWindow(
            "sweep deltas must be finite and positive".into(),
        ));
    }
    if deltas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidWindow(
            "sweep deltas must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Weighted log-log fit over the cells with at least one success;
/// the weights are the delta-method inverse variances of `ln p̂`.
fn scaling_fit(cells: &[ScalingCell]) -> (Option<LineFit>, usize) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    let mut dropped = 0usize;
    for cell in cells {
        let s = cell.estimate.successes;
        let t = cell.estimate.trials;
        if s == 0 {
            dropped += 1;
            continue;
        }
        // var(ln p̂) ≈ (1−p)/(T·p) = (T−s)/(T·s), so the inverse-variance
        // weight is T·s/(T−s); the failure count is clamped so a fully
        // saturated cell keeps a finite weight.
        let failures = ((t - s) as f64).max(0.5);
        xs.push(cell.delta.ln());
        ys.push(cell.estimate.probability.ln());
        ws.push(t as f64 * s as f64 / failures);
    }
    (mc::weighted_line_fit(&xs, &ys, &ws), dropped)
}

/// δ-sweep of [`wegner_probability`] with a log-log slope fit
/// (the estimate's linearity in the window size predicts slope ≈ 1).
/// Each cell draws independent trials from its own stage seed.
pub fn wegner_scan(
    e0: f64,
    n: usize,
    lambda: f64,
    deltas: &[f64],
    trials: u64,
    seed: u64,
) -> Result<ScalingExperiment> {
    validate_delta_grid(deltas)?;
    let mut cells = Vec::with_capacity(deltas.len());
    for (i, &d) in deltas.iter().enumerate() {
        cells.push(wegner_probability(
            e0,
            d,
            n,
            lambda,
            trials,
            stage_seed(seed, i as u64),
        )?);
    }
    let (fit, dropped_zero_cells) = scaling_fit(&cells);
    Ok(ScalingExperiment {
        cells,
        fit,
        dropped_zero_cells,
    })
}

/// δ-sweep of [`minami_probability`] with a log-log slope fit
/// (eigenvalue repulsion in small windows predicts slope ≈ 2).
pub fn minami_scan(
    e0: f64,
    n: usize,
    lambda: f64,
    deltas: &[f64],
    trials: u64,
    c_cfg: f64,
    seed: u64,
) -> Result<ScalingExperiment> {
    validate_delta_grid(deltas)?;
    let mut cells = Vec::with_capacity(deltas.len());
    for (i, &d) in deltas.iter().enumerate() {
        cells.push(minami_probability(
            e0,
            d,
            n,
            lambda,
            trials,
            c_cfg,
            stage_seed(seed, i as u64),
        )?);
    }
    let (fit, dropped_zero_cells) = scaling_fit(&cells);
    Ok(ScalingExperiment {
        cells,
        fit,
        dropped_zero_cells,
    })
}

/// Outcome of a near-resonance search: two eigenpairs in a δ-window whose
/// boundary amplitudes are all below `N^{−exponent}`.
#[derive(Debug, Clone, Serialize)]
pub struct NearResonanceReport {
    pub occurred: bool,
    /// Indices (into the window's eigenpair list) of the witness pair.
    pub witnesses: Option<(usize, usize)>,
    pub witness_eigenvalues: Option<(f64, f64)>,
    /// Largest boundary amplitude over the witness pair.
    pub boundary_max: Option<f64>,
    /// The amplitude threshold `N^{−exponent}` used.
    pub threshold: f64,
    pub eigenvalues_in_window: usize,
    /// Eigenpairs in the window passing the boundary-amplitude test.
    pub candidates: usize,
}

/// Default boundary-amplitude exponent (threshold `N^{−10}`).
pub const RESONANCE_EXPONENT: f64 = 10.0;
/// Relaxed exponent for small-`N` studies (`N ≲ 500`), where `N^{−10}`
/// underflows the meaningful amplitude range.
pub const RESONANCE_EXPONENT_RELAXED: f64 = 3.0;

/// Searches `H` for a near-resonant pair: at least two eigenpairs with
/// eigenvalue in `[E₀−δ, E₀+δ)` whose amplitudes at the boundary sites
/// (`j` and `N−j` for `1 ≤ j < √N`, in interval-local coordinates) all
/// stay below `N^{−exponent}`.
///
/// The witnesses are restricted to exact eigenpairs: they minimize
/// `‖(H−E₀)ξ‖` among unit vectors, so the restriction only shrinks the
/// event and keeps the upper-bound test direction intact.
pub fn near_resonance_event(
    h: &TridiagonalHamiltonian,
    e0: f64,
    delta: f64,
    exponent: f64,
) -> Result<NearResonanceReport> {
    let n = h.size();
    if n < 16 {
        return Err(Error::Precondition(format!(
            "near-resonance search needs N >= 16, got {n}"
        )));
    }
    if !e0.is_finite() || !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidWindow(
            "near-resonance window must be finite with delta >= 0".into(),
        ));
    }
    if !(exponent > 0.0) {
        return Err(Error::Precondition(format!(
            "boundary exponent must be positive, got {exponent}"
        )));
    }
    let threshold = (n as f64).powf(-exponent);
    let absent = |count: usize| NearResonanceReport {
        occurred: false,
        witnesses: None,
        witness_eigenvalues: None,
        boundary_max: None,
        threshold,
        eigenvalues_in_window: count,
        candidates: 0,
    };
    if delta == 0.0 {
        return Ok(absent(0));
    }
    let window = (e0 - delta, e0 + delta);
    // Cheap count first: the event needs two eigenvalues before any
    // eigenvector is worth solving for.
    let count = sturm_count(h, window.1) - sturm_count(h, window.0);
    if count < 2 {
        return Ok(absent(count));
    }
    let result = eigen_window(h, window, true)?;
    let vectors = result.eigenvectors.as_ref().expect("vectors requested");
    let j_max = ((n as f64).sqrt() - 1e-9).floor() as usize;
    let mut candidates: Vec<(f64, usize)> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut amp = 0.0f64;
        for j in 1..=j_max {
            amp = amp.max(v[j - 1].abs()).max(v[n - j - 1].abs());
        }
        if amp < threshold {
            candidates.push((amp, i));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    if candidates.len() < 2 {
        let mut report = absent(count);
        report.candidates = candidates.len();
        return Ok(report);
    }
    let (amp_a, idx_a) = candidates[0];
    let (amp_b, idx_b) = candidates[1];
    Ok(NearResonanceReport {
        occurred: true,
        witnesses: Some((idx_a, idx_b)),
        witness_eigenvalues: Some((result.eigenvalues[idx_a], result.eigenvalues[idx_b])),
        boundary_max: Some(amp_a.max(amp_b)),
        threshold,
        eigenvalues_in_window: count,
        candidates: candidates.len(),
    })
}

/// δ-sweep of the near-resonance event probability over disorder, with a
/// log-log slope fit (the quadratic smallness predicts slope ≈ 2).
pub fn near_resonance_scan(
    e0: f64,
    n: usize,
    lambda: f64,
    deltas: &[f64],
    exponent: f64,
    trials: u64,
    seed: u64,
) -> Result<ScalingExperiment> {
    validate_delta_grid(deltas)?;
    if n < 16 {
        return Err(Error::Precondition(format!(
            "near-resonance search needs N >= 16, got {n}"
        )));
    }
    let mut cells = Vec::with_capacity(deltas.len());
    for (i, &d) in deltas.iter().enumerate() {
        let cell_seed = stage_seed(seed, i as u64);
        let outcomes: Vec<Result<bool>> = mc::run_trials(trials, |t| {
            let pot = sample_potential(n, seed_for_trial(cell_seed, t)).expect("n >= 1");
            let h = build_hamiltonian(&pot, lambda, (1, n)).expect("interval valid");
            near_resonance_event(&h, e0, d, exponent).map(|r| r.occurred)
        });
        let mut successes = 0u64;
        for o in outcomes {
            if o? {
                successes += 1;
            }
        }
        cells.push(ScalingCell {
            n,
            delta: d,
            estimate: BinomialEstimate::from_counts(successes, trials),
            in_band: in_admissible_band(e0 - d, e0 + d),
        });
    }
    let (fit, dropped_zero_cells) = scaling_fit(&cells);
    Ok(ScalingExperiment {
        cells,
        fit,
        dropped_zero_cells,
    })
}

/// Overlapping windows of length `M` covering `[1, N]` at stride `⌊M/2⌋`
/// (final window clamped to `[N−M+1, N]`). At most `2·ceil(N/M)` windows;
/// every site further than `M/10` from both ends of `[1, N]` has a window
/// in which it sits at distance ≥ `M/10` from the boundary.
pub fn localization_partition(n: usize, m: usize) -> Result<Vec<(usize, usize)>> {
    if m == 0 {
        return Err(Error::InvalidSize("window length must be >= 1".into()));
    }
    if m > n {
        return Err(Error::InvalidSize(format!(
            "window length {m} exceeds volume {n}"
        )));
    }
    // Rounding the stride up keeps the window count within 2*ceil(n/m)
    // for odd window lengths while preserving the half-overlap.
    let stride = m.div_ceil(2);
    let last_start = n - m + 1;
    let mut windows = Vec::new();
    let mut start = 1usize;
    while start <= last_start {
        windows.push((start, start + m - 1));
        start += stride;
    }
    if windows.last() != Some(&(last_start, n)) {
        windows.push((last_start, n));
    }
    Ok(windows)
}

/// Distance from `j` to the nearest boundary of window `(lo, hi)`
/// (negative when outside).
pub fn boundary_distance(window: (usize, usize), j: usize) -> i64 {
    let (lo, hi) = (window.0 as i64, window.1 as i64);
    let j = j as i64;
    (j - lo).min(hi - j)
}

/// The window in which `j` sits deepest (first on ties), with that depth.
pub fn best_window(windows: &[(usize, usize)], j: usize) -> Option<((usize, usize), i64)> {
    windows
        .iter()
        .map(|w| (*w, boundary_distance(*w, j)))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0 .0.cmp(&a.0 .0)))
}

/// Index pairs of windows with disjoint supports — candidates for
/// independent-count arguments (the restrictions share no potential
/// entries).
pub fn independent_pairs(windows: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..windows.len() {
        for j in (i + 1)..windows.len() {
            if windows[i].1 < windows[j].0 || windows[j].1 < windows[i].0 {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Default localization scales `M = (ln N)⁴` and `M₁ = (ln N)³`, rounded
/// and clamped into `[4, N]` and `[2, M]` respectively.
pub fn default_scales(n: usize) -> (usize, usize) {
    let ln = (n.max(2) as f64).ln();
    let m = (ln.powi(4).round() as usize).clamp(4, n.max(4)).min(n.max(1));
    let m1 = (ln.powi(3).round() as usize).clamp(2, m);
    (m, m1)
}

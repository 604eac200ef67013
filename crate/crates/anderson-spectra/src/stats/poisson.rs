//! Rescaled local eigenvalue point processes and the Poisson test battery.
//!
//! Eigenvalues of `H_N` inside the microscopic window `[E₀, E₀ + L/N]` are
//! mapped to `x = N·(E − E₀) ∈ [0, L]`. In the localized regime these
//! points should behave like a Poisson process with intensity `k(E₀)`
//! (the density of states): Poisson-distributed counts, exponential gaps,
//! and independent counts in disjoint sub-intervals. Each claim gets its
//! own test with a reported p-value.

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Normal, Poisson};

use crate::error::Error;
use crate::mc;
use crate::model::{build_hamiltonian, sample_potential, PotentialRealization};
use crate::rng::{seed_for_trial, stage_seed, trial_rng};
use crate::spectrum::eigen_window;
use crate::Result;

/// Minimum number of samples the test battery accepts.
pub const MIN_POISSON_SAMPLES: usize = 500;

/// Rescaled eigenvalues of one disorder realization in a microscopic
/// energy window.
#[derive(Debug, Clone, Serialize)]
pub struct PointProcessSample {
    /// Sorted rescaled eigenvalues `N·(E − E₀)`, all in `[0, L]`.
    pub points: Vec<f64>,
    pub l: f64,
    pub e0: f64,
    /// Volume of the underlying Hamiltonian (0 for synthetic samples).
    pub n: usize,
    /// Trial seed that produced the realization.
    pub seed: u64,
}

/// Computes the rescaled point process of one realization: the eigenvalues
/// of `H` in `[E₀, E₀ + L/N]`, mapped through `E ↦ N·(E − E₀)`.
///
/// Meaningful when the window sits inside the admissible energy band; the
/// arithmetic itself has no such restriction, so the band is not enforced
/// here.
pub fn rescaled_sample(
    pot: &PotentialRealization,
    lambda: f64,
    e0: f64,
    l: f64,
) -> Result<PointProcessSample> {
    if !e0.is_finite() || !l.is_finite() || l < 0.0 {
        return Err(Error::InvalidWindow(format!(
            "rescaled window needs finite E0 and L >= 0, got E0={e0}, L={l}"
        )));
    }
    let n = pot.n();
    let nf = n as f64;
    let points = if l == 0.0 {
        Vec::new()
    } else {
        let h = build_hamiltonian(pot, lambda, (1, n))?;
        let window = (e0, e0 + l / nf);
        let result = eigen_window(&h, window, false)?;
        result
            .eigenvalues
            .iter()
            .map(|e| (nf * (e - e0)).clamp(0.0, l))
            .collect()
    };
    Ok(PointProcessSample {
        points,
        l,
        e0,
        n,
        seed: pot.seed(),
    })
}

/// Draws `trials` independent realizations and collects their rescaled
/// samples (parallel over trials, deterministic in `seed`).
pub fn rescaled_samples(
    lambda: f64,
    n: usize,
    e0: f64,
    l: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<PointProcessSample>> {
    if n == 0 {
        return Err(Error::InvalidSize("matrix size must be >= 1".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidSize("need at least 1 trial".into()));
    }
    let samples: Vec<Result<PointProcessSample>> = mc::run_trials(trials, |t| {
        let pot = sample_potential(n, seed_for_trial(seed, t))?;
        rescaled_sample(&pot, lambda, e0, l)
    });
    samples.into_iter().collect()
}

/// Configuration of [`poisson_tests`].
#[derive(Debug, Clone, Serialize)]
pub struct PoissonTestConfig {
    /// Parametric bootstrap replicates for the gap test's primary p-value.
    pub bootstrap_reps: u32,
    /// Seed of the bootstrap streams.
    pub seed: u64,
    /// Density of states at `E₀`, if available, for the mean-count
    /// consistency line (`E[#points] ≈ k(E₀)·L`).
    pub k_at_e0: Option<f64>,
}

impl Default for PoissonTestConfig {
    fn default() -> Self {
        PoissonTestConfig {
            bootstrap_reps: 500,
            seed: 0,
            k_at_e0: None,
        }
    }
}

/// Chi-square goodness of fit of the per-trial point counts against a
/// Poisson law with the empirical mean. Adjacent count categories are
/// pooled until each expected count is ≥ 5; degrees of freedom are
/// `bins − 2` (normalization + estimated mean).
#[derive(Debug, Clone, Serialize)]
pub struct CountChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub bins: usize,
    /// `None` when pooling leaves no degrees of freedom.
    pub p_value: Option<f64>,
}

/// Kolmogorov–Smirnov comparison of gaps against the exponential law with
/// matched mean.
#[derive(Debug, Clone, Serialize)]
pub struct GapKs {
    pub n_gaps: usize,
    pub statistic: Option<f64>,
    pub mean_gap: Option<f64>,
    /// Calibrated p-value from a parametric bootstrap under the fitted
    /// Poisson null — the battery's decision value. `None` for the pooled
    /// comparison variant or when there are no gaps.
    pub p_bootstrap: Option<f64>,
    /// Large-sample Kolmogorov p-value (Stephens small-sample factor).
    /// Biased for within-trial gaps at small mean counts because the
    /// matched mean is re-estimated from few points; kept for comparison.
    pub p_asymptotic: Option<f64>,
}

/// Pearson correlation of the point counts in `[0, L/2)` and `[L/2, L]`
/// across trials, with a Fisher-z confidence interval and p-value.
#[derive(Debug, Clone, Serialize)]
pub struct HalfIntervalCorrelation {
    /// `None` when either half has zero count variance.
    pub rho: Option<f64>,
    pub ci95: Option<(f64, f64)>,
    pub p_value: Option<f64>,
    pub trials: usize,
}

/// Joint report of the three Poisson diagnostics plus mean-count summary.
#[derive(Debug, Clone, Serialize)]
pub struct PoissonBattery {
    pub trials: usize,
    pub l: f64,
    pub mean_count: f64,
    pub mean_count_stderr: f64,
    /// `k(E₀)·L` when the density was supplied.
    pub expected_mean_count: Option<f64>,
    pub counts: CountChiSquare,
    /// Within-trial gaps (trials with ≥ 2 points), pooled across trials.
    pub gaps: GapKs,
    /// Comparison variant: spacings of all points superposed across trials.
    pub gaps_pooled: GapKs,
    pub correlation: HalfIntervalCorrelation,
}

impl PoissonBattery {
    /// Names of the tests whose primary p-value falls below `level`.
    pub fn rejections(&self, level: f64) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.counts.p_value.is_some_and(|p| p < level) {
            out.push("counts");
        }
        if self.gaps.p_bootstrap.is_some_and(|p| p < level) {
            out.push("gaps");
        }
        if self.correlation.p_value.is_some_and(|p| p < level) {
            out.push("correlation");
        }
        out
    }

    pub fn passes(&self, level: f64) -> bool {
        self.rejections(level).is_empty()
    }
}

/// Runs the three-part Poisson battery on a collection of samples sharing
/// one interval length. Needs at least [`MIN_POISSON_SAMPLES`] samples.
pub fn poisson_tests(
    samples: &[PointProcessSample],
    config: &PoissonTestConfig,
) -> Result<PoissonBattery> {
    if samples.len() < MIN_POISSON_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: samples.len(),
            need: MIN_POISSON_SAMPLES,
        });
    }
    let l = samples[0].l;
    if !(l > 0.0) || samples.iter().any(|s| s.l != l) {
        return Err(Error::Precondition(
            "samples must share one positive interval length".into(),
        ));
    }

    let counts: Vec<u64> = samples.iter().map(|s| s.points.len() as u64).collect();
    let t = counts.len();
    let total: u64 = counts.iter().sum();
    let mean_count = total as f64 / t as f64;
    let sumsq: u128 = counts.iter().map(|c| u128::from(*c) * u128::from(*c)).sum();
    let count_var =
        ((sumsq as f64) - (total as f64) * mean_count) / (t as f64 - 1.0);
    let mean_count_stderr = (count_var.max(0.0) / t as f64).sqrt();

    let counts_test = count_chi_square(&counts, mean_count);

    // Within-trial gaps, pooled over the trials that have at least two
    // points (the sample points are already sorted).
    let mut gaps_within: Vec<f64> = Vec::new();
    for s in samples {
        if s.points.len() >= 2 {
            gaps_within.extend(s.points.windows(2).map(|w| w[1] - w[0]));
        }
    }
    let gaps = gap_ks_report(
        gaps_within,
        Some((t, mean_count, l, config.bootstrap_reps, config.seed)),
    );

    // Comparison variant: superpose every trial's points on [0, L] and
    // take the spacings of the overlay.
    let mut overlay: Vec<f64> = samples.iter().flat_map(|s| s.points.iter().copied()).collect();
    overlay.sort_by(|a, b| a.total_cmp(b));
    let pooled_gaps: Vec<f64> = overlay.windows(2).map(|w| w[1] - w[0]).collect();
    let gaps_pooled = gap_ks_report(pooled_gaps, None);

    let correlation = half_interval_correlation(samples, l);

    Ok(PoissonBattery {
        trials: t,
        l,
        mean_count,
        mean_count_stderr,
        expected_mean_count: config.k_at_e0.map(|k| k * l),
        counts: counts_test,
        gaps,
        gaps_pooled,
        correlation,
    })
}

fn count_chi_square(counts: &[u64], mean: f64) -> CountChiSquare {
    let t = counts.len() as f64;
    if !(mean > 0.0) {
        return CountChiSquare {
            statistic: 0.0,
            dof: 0,
            bins: 0,
            p_value: None,
        };
    }
    let k_max = *counts.iter().max().expect("nonempty") as usize;
    let pois = Poisson::new(mean).expect("mean > 0");
    let mut observed = vec![0.0f64; k_max + 1];
    for &c in counts {
        observed[c as usize] += 1.0;
    }
    let mut expected: Vec<f64> = (0..=k_max).map(|k| t * pois.pmf(k as u64)).collect();
    // The last category absorbs the upper tail mass.
    expected[k_max] += (t * (1.0 - pois.cdf(k_max as u64))).max(0.0);

    // Greedy pooling so every bin has expected count >= 5.
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut obs_acc, mut exp_acc) = (0.0f64, 0.0f64);
    for k in 0..=k_max {
        obs_acc += observed[k];
        exp_acc += expected[k];
        if exp_acc >= 5.0 {
            bins.push((obs_acc, exp_acc));
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    if obs_acc > 0.0 || exp_acc > 0.0 {
        if let Some(last) = bins.last_mut() {
            last.0 += obs_acc;
            last.1 += exp_acc;
        } else {
            bins.push((obs_acc, exp_acc));
        }
    }
    let statistic: f64 = bins
        .iter()
        .map(|(o, e)| if *e > 0.0 { (o - e) * (o - e) / e } else { 0.0 })
        .sum();
    let dof = bins.len().saturating_sub(2);
    let p_value = if dof >= 1 {
        let chi = ChiSquared::new(dof as f64).expect("dof >= 1");
        Some((1.0 - chi.cdf(statistic)).clamp(0.0, 1.0))
    } else {
        None
    };
    CountChiSquare {
        statistic,
        dof,
        bins: bins.len(),
        p_value,
    }
}

/// KS distance of the gaps against the exponential law with matched mean,
/// plus p-values. `bootstrap` carries `(trials, mean_count, l, reps, seed)`
/// for the within-trial variant; `None` skips the bootstrap.
fn gap_ks_report(
    mut gaps: Vec<f64>,
    bootstrap: Option<(usize, f64, f64, u32, u64)>,
) -> GapKs {
    let n_gaps = gaps.len();
    let Some((d, mean_gap)) = exponential_ks(&mut gaps) else {
        return GapKs {
            n_gaps,
            statistic: None,
            mean_gap: None,
            p_bootstrap: None,
            p_asymptotic: None,
        };
    };
    let p_asymptotic = Some(ks_asymptotic_p(d, n_gaps));
    let p_bootstrap = bootstrap.and_then(|(trials, mean_count, l, reps, seed)| {
        bootstrap_gap_p(d, trials, mean_count, l, reps, seed)
    });
    GapKs {
        n_gaps,
        statistic: Some(d),
        mean_gap: Some(mean_gap),
        p_bootstrap,
        p_asymptotic,
    }
}

/// Sorts the gaps and returns `(D, matched mean)`; `None` when there are
/// no gaps or the mean degenerates to zero.
fn exponential_ks(gaps: &mut [f64]) -> Option<(f64, f64)> {
    if gaps.is_empty() {
        return None;
    }
    gaps.sort_by(|a, b| a.total_cmp(b));
    let n = gaps.len() as f64;
    let mean = mc::compensated_sum(gaps.iter().copied()) / n;
    if !(mean > 0.0) {
        return None;
    }
    let mut d = 0.0f64;
    for (i, g) in gaps.iter().enumerate() {
        let f = 1.0 - (-g / mean).exp();
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Some((d, mean))
}

/// Kolmogorov limiting tail `Q(t) = 2 Σ_{j≥1} (−1)^{j−1} e^{−2 j² t²}`,
/// evaluated with the Stephens finite-sample factor
/// `(√n + 0.12 + 0.11/√n)·D`.
fn ks_asymptotic_p(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let t = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    if t <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0f64;
    for j in 1..=100u32 {
        let term = 2.0 * (-2.0 * (j as f64) * (j as f64) * t * t).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Parametric bootstrap of the gap KS distance: replicate datasets are
/// drawn from the fitted Poisson null (counts Poisson with the empirical
/// mean, positions uniform), processed exactly like the real data, and the
/// p-value is `(1 + #{D* ≥ D}) / (reps + 1)`.
fn bootstrap_gap_p(
    d_obs: f64,
    trials: usize,
    mean_count: f64,
    l: f64,
    reps: u32,
    seed: u64,
) -> Option<f64> {
    if reps == 0 || !(mean_count > 0.0) {
        return None;
    }
    let d_stars: Vec<Option<f64>> = mc::run_trials(u64::from(reps), |r| {
        let mut rng = trial_rng(seed, r);
        let mut gaps: Vec<f64> = Vec::new();
        for _ in 0..trials {
            let c = sample_poisson(&mut rng, mean_count);
            if c >= 2 {
                let mut pts: Vec<f64> = (0..c).map(|_| rng.random_range(0.0..l)).collect();
                pts.sort_by(|a, b| a.total_cmp(b));
                gaps.extend(pts.windows(2).map(|w| w[1] - w[0]));
            }
        }
        exponential_ks(&mut gaps).map(|(d, _)| d)
    });
    let mut exceed = 0u64;
    let mut valid = 0u64;
    for d in d_stars.into_iter().flatten() {
        valid += 1;
        if d >= d_obs {
            exceed += 1;
        }
    }
    if valid == 0 {
        return None;
    }
    Some((1.0 + exceed as f64) / (valid as f64 + 1.0))
}

/// Knuth's product-of-uniforms Poisson sampler (fine for desk-scale means).
fn sample_poisson<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    let limit = (-mean).exp();
    let mut k = 0u64;
    let mut p = 1.0f64;
    loop {
        p *= rng.random::<f64>();
        if p <= limit {
            return k;
        }
        k += 1;
    }
}

fn half_interval_correlation(samples: &[PointProcessSample], l: f64) -> HalfIntervalCorrelation {
    let t = samples.len();
    let half = l / 2.0;
    let a: Vec<f64> = samples
        .iter()
        .map(|s| s.points.iter().filter(|p| **p < half).count() as f64)
        .collect();
    let b: Vec<f64> = samples
        .iter()
        .zip(&a)
        .map(|(s, na)| s.points.len() as f64 - na)
        .collect();
    let tf = t as f64;
    let mean_a = mc::compensated_sum(a.iter().copied()) / tf;
    let mean_b = mc::compensated_sum(b.iter().copied()) / tf;
    let cov = mc::compensated_sum(
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - mean_a) * (y - mean_b)),
    );
    let var_a = mc::compensated_sum(a.iter().map(|x| (x - mean_a) * (x - mean_a)));
    let var_b = mc::compensated_sum(b.iter().map(|y| (y - mean_b) * (y - mean_b)));
    if var_a <= 0.0 || var_b <= 0.0 || t < 4 {
        return HalfIntervalCorrelation {
            rho: None,
            ci95: None,
            p_value: None,
            trials: t,
        };
    }
    let rho = (cov / (var_a.sqrt() * var_b.sqrt())).clamp(-1.0, 1.0);
    if rho.abs() >= 1.0 {
        return HalfIntervalCorrelation {
            rho: Some(rho),
            ci95: None,
            p_value: Some(0.0),
            trials: t,
        };
    }
    // Fisher z-transform: atanh(ρ)·√(T−3) is approximately standard normal
    // under independence.
    let z = rho.atanh() * ((t - 3) as f64).sqrt();
    let normal = Normal::new(0.0, 1.0).expect("valid");
    let p_value = (2.0 * (1.0 - normal.cdf(z.abs()))).clamp(0.0, 1.0);
    let width = 1.96 / ((t - 3) as f64).sqrt();
    let ci95 = (
        (rho.atanh() - width).tanh(),
        (rho.atanh() + width).tanh(),
    );
    HalfIntervalCorrelation {
        rho: Some(rho),
        ci95: Some(ci95),
        p_value: Some(p_value),
        trials: t,
    }
}

/// Draws `trials` samples from a true Poisson process on `[0, L]` with the
/// given mean count — the null generator for calibration and self-tests.
pub fn synthetic_poisson_samples(
    mean_count: f64,
    l: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<PointProcessSample>> {
    if !(mean_count >= 0.0) || !mean_count.is_finite() {
        return Err(Error::NonFinite("synthetic mean count"));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidWindow(format!(
            "interval length must be positive, got {l}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidSize("need at least 1 trial".into()));
    }
    Ok(mc::run_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let c = sample_poisson(&mut rng, mean_count);
        let mut points: Vec<f64> = (0..c).map(|_| rng.random_range(0.0..l)).collect();
        points.sort_by(|a, b| a.total_cmp(b));
        PointProcessSample {
            points,
            l,
            e0: 0.0,
            n: 0,
            seed: seed_for_trial(seed, t),
        }
    }))
}

/// Parameters of [`calibrate_poisson_battery`].
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationParams {
    pub mean_count: f64,
    pub l: f64,
    /// Samples per regeneration (≥ [`MIN_POISSON_SAMPLES`]).
    pub trials: u64,
    pub regenerations: u32,
    /// Rejection level being calibrated.
    pub level: f64,
    pub bootstrap_reps: u32,
    pub seed: u64,
}

impl Default for CalibrationParams {
    fn default() -> Self {
        CalibrationParams {
            mean_count: 5.0,
            l: 5.0,
            trials: 600,
            regenerations: 300,
            level: 0.01,
            bootstrap_reps: 300,
            seed: 0,
        }
    }
}

/// Observed Type-I rejection counts of each battery test over repeated
/// true-Poisson regenerations.
#[derive(Debug, Clone, Serialize)]
pub struct PoissonCalibration {
    pub regenerations: u32,
    pub level: f64,
    pub count_rejections: u32,
    pub gap_rejections: u32,
    pub correlation_rejections: u32,
}

impl PoissonCalibration {
    /// Rejection rates `(counts, gaps, correlation)`.
    pub fn rates(&self) -> (f64, f64, f64) {
        let r = f64::from(self.regenerations);
        (
            f64::from(self.count_rejections) / r,
            f64::from(self.gap_rejections) / r,
            f64::from(self.correlation_rejections) / r,
        )
    }

    pub fn worst_rate(&self) -> f64 {
        let (a, b, c) = self.rates();
        a.max(b).max(c)
    }
}

/// Self-test of the battery: regenerates true-Poisson data and tallies how
/// often each test rejects at `level`. A calibrated battery keeps every
/// rate near the nominal level.
pub fn calibrate_poisson_battery(params: &CalibrationParams) -> Result<PoissonCalibration> {
    if params.regenerations == 0 {
        return Err(Error::InvalidSize("need at least 1 regeneration".into()));
    }
    if !(params.level > 0.0 && params.level < 1.0) {
        return Err(Error::Precondition(format!(
            "level must be in (0, 1), got {}",
            params.level
        )));
    }
    let outcomes: Vec<Result<(bool, bool, bool)>> =
        mc::run_trials(u64::from(params.regenerations), |r| {
            let samples = synthetic_poisson_samples(
                params.mean_count,
                params.l,
                params.trials,
                stage_seed(params.seed, 2 * r),
            )?;
            let config = PoissonTestConfig {
                bootstrap_reps: params.bootstrap_reps,
                seed: stage_seed(params.seed, 2 * r + 1),
                k_at_e0: None,
            };
            let battery = poisson_tests(&samples, &config)?;
            Ok((
                battery.counts.p_value.is_some_and(|p| p < params.level),
                battery.gaps.p_bootstrap.is_some_and(|p| p < params.level),
                battery
                    .correlation
                    .p_value
                    .is_some_and(|p| p < params.level),
            ))
        });
    let mut calibration = PoissonCalibration {
        regenerations: params.regenerations,
        level: params.level,
        count_rejections: 0,
        gap_rejections: 0,
        correlation_rejections: 0,
    };
    for o in outcomes {
        let (c, g, rho) = o?;
        calibration.count_rejections += u32::from(c);
        calibration.gap_rejections += u32::from(g);
        calibration.correlation_rejections += u32::from(rho);
    }
    Ok(calibration)
}

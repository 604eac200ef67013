//! Transfer-matrix formalism for `Hξ = Eξ`.
//!
//! A solution of the difference equation `ξ_{j+1} + ξ_{j-1} + λv_j ξ_j = E ξ_j`
//! is propagated by the `SL(2, ℝ)` step matrix
//!
//! ```text
//! T_j(E) = [ E − λ v_j   −1 ]
//!          [ 1            0 ]
//! ```
//!
//! and the ordered product `M_n(E) = T_n ⋯ T_1` maps `(ξ_1, ξ_0)` to
//! `(ξ_{n+1}, ξ_n)`. Norms of `M_n` grow like `e^{L(E) n}` with `L` the
//! Lyapunov exponent, so the product is renormalized *every* step: the
//! largest entry magnitude is divided out into an accumulated `log_scale`.
//! (QR-based renormalization buys nothing at 2×2.)
//!
//! On top of the plain product this module provides the projective-circle
//! dynamics: the stationary (Furstenberg) measure of the random walk
//! `θ ↦ τ_{g_±}(θ)`, its maximal window mass `τ(ε)`, Lyapunov-exponent
//! estimation, and the Monte Carlo estimators for the large-deviation,
//! angle-concentration and uniform-norm bounds.

use rand::Rng;
use serde::Serialize;

use crate::error::Error;
use crate::mc::{self, BinomialEstimate, LineFit};
use crate::model::{sample_potential, PotentialRealization};
use crate::rng::{stage_seed, trial_rng};
use crate::Result;

use std::f64::consts::PI;

/// Row-major 2×2 real matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// `self * rhs` (matrix product).
    pub fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Matrix–vector product.
    pub fn apply(self, v: (f64, f64)) -> (f64, f64) {
        (self.a * v.0 + self.b * v.1, self.c * v.0 + self.d * v.1)
    }

    /// Largest entry magnitude.
    pub fn max_abs(self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Largest singular value, closed form: with `p = ‖A‖_F²` and
    /// `q = |det A|`, `σ₊ = (√(p+2q) + √(p−2q)) / 2`.
    pub fn spectral_norm(self) -> f64 {
        let p = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let q = self.det().abs();
        ((p + 2.0 * q).sqrt() + (p - 2.0 * q).max(0.0).sqrt()) / 2.0
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }
}

/// One transfer step `[[E − λv, −1], [1, 0]]`; determinant is exactly 1.
pub fn transfer_step(energy: f64, v: i8, lambda: f64) -> Mat2 {
    Mat2 {
        a: energy - lambda * v as f64,
        b: -1.0,
        c: 1.0,
        d: 0.0,
    }
}

/// A renormalized product of transfer steps. The represented matrix is
/// `exp(log_scale) · matrix`; `matrix` keeps its largest entry magnitude at
/// 1 (well inside the contractual `[1/2, 2]`), so overflow is impossible
/// for any product length.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TransferProduct {
    matrix: Mat2,
    log_scale: f64,
    length: usize,
}

impl TransferProduct {
    /// Empty product (identity, length 0).
    pub fn identity() -> Self {
        TransferProduct {
            matrix: Mat2::IDENTITY,
            log_scale: 0.0,
            length: 0,
        }
    }

    /// Left-multiplies one step onto the product and renormalizes.
    pub fn push(&mut self, step: Mat2) {
        let m = step.mul(self.matrix);
        let s = m.max_abs();
        debug_assert!(s > 0.0, "transfer product became singular");
        let inv = 1.0 / s;
        self.matrix = Mat2 {
            a: m.a * inv,
            b: m.b * inv,
            c: m.c * inv,
            d: m.d * inv,
        };
        self.log_scale += s.ln();
        self.length += 1;
    }

    /// The renormalized matrix factor.
    pub fn matrix(&self) -> Mat2 {
        self.matrix
    }

    /// Accumulated natural log of the extracted scale factors.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Number of steps multiplied in.
    pub fn length(&self) -> usize {
        self.length
    }

    /// `log ‖M_n‖₂` of the represented (unscaled) product.
    pub fn log_norm(&self) -> f64 {
        self.log_scale + self.matrix.spectral_norm().ln()
    }

    /// Unit vector in the direction of `M_n · v` (the overall scale factor
    /// is positive, so the sign is meaningful).
    pub fn apply_direction(&self, v: (f64, f64)) -> (f64, f64) {
        let (x, y) = self.matrix.apply(v);
        let norm = x.hypot(y);
        debug_assert!(norm > 0.0);
        (x / norm, y / norm)
    }

    /// Relative departure of the represented determinant from 1, i.e.
    /// `|det(matrix)·exp(2·log_scale) − 1|` evaluated in log space.
    ///
    /// Once `2·log_scale` is large the true determinant of `matrix`
    /// underflows below the absolute rounding floor of its entries and the
    /// check is no longer evaluable in f64; `None` signals that (it is not
    /// a failure).
    pub fn det_residual(&self) -> Option<f64> {
        let det = self.matrix.det();
        if det <= 0.0 {
            return None;
        }
        Some((det.ln() + 2.0 * self.log_scale).exp_m1().abs())
    }
}

/// The full transfer product `M_n(E) = T_n ⋯ T_1` over a potential sample.
///
/// Rejects non-finite `E`/`λ` up front; overflow cannot occur thanks to the
/// per-step renormalization.
pub fn transfer_product(
    energy: f64,
    pot: &PotentialRealization,
    lambda: f64,
) -> Result<TransferProduct> {
    if !energy.is_finite() {
        return Err(Error::NonFinite("energy"));
    }
    if !lambda.is_finite() {
        return Err(Error::NonFinite("lambda"));
    }
    let mut prod = TransferProduct::identity();
    for j in 1..=pot.n() {
        prod.push(transfer_step(energy, pot.site(j), lambda));
    }
    Ok(prod)
}

/// A direction in the projective line, represented by its angle in `[0, π)`.
/// The representative vector is `(cos θ, sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct ProjectiveAngle(f64);

impl ProjectiveAngle {
    /// Reduces an arbitrary angle mod π into `[0, π)`.
    pub fn new(theta: f64) -> Self {
        assert!(theta.is_finite(), "projective angle must be finite");
        let mut t = theta.rem_euclid(PI);
        // rem_euclid can round to exactly π for tiny negative inputs.
        if t >= PI {
            t -= PI;
        }
        ProjectiveAngle(t)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Direction of a nonzero vector.
    pub fn from_vector(x: f64, y: f64) -> Self {
        assert!(x != 0.0 || y != 0.0, "zero vector has no direction");
        Self::new(y.atan2(x))
    }

    pub fn unit_vector(self) -> (f64, f64) {
        (self.0.cos(), self.0.sin())
    }

    /// The perpendicular direction `θ ± π/2` (mod π).
    pub fn perpendicular(self) -> Self {
        Self::new(self.0 + PI / 2.0)
    }

    /// Circular distance on the projective line (diameter metric), in
    /// `[0, π/2]`.
    pub fn distance(self, other: ProjectiveAngle) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(PI - d)
    }
}

/// Projective action `τ_g(θ)`: direction of `g · (cos θ, sin θ)`.
/// Requires invertible `g` (the image of a nonzero vector is then nonzero).
pub fn projective_action(g: Mat2, theta: ProjectiveAngle) -> ProjectiveAngle {
    assert!(g.det() != 0.0, "projective action needs an invertible matrix");
    let (x, y) = g.apply(theta.unit_vector());
    ProjectiveAngle::from_vector(x, y)
}

/// Parameters of the Furstenberg-measure estimator. Defaults: 512 bins,
/// 10³ burn-in steps, 10⁶ recorded steps.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FurstenbergParams {
    pub bins: usize,
    pub burn_in: u64,
    pub steps: u64,
    pub seed: u64,
}

impl Default for FurstenbergParams {
    fn default() -> Self {
        FurstenbergParams {
            bins: 512,
            burn_in: 1_000,
            steps: 1_000_000,
            seed: 0,
        }
    }
}

/// Occupation histogram of the projective random walk: an estimate of the
/// stationary measure `ν_E` on `[0, π)`, together with a stationarity
/// residual quantifying how far the histogram is from being invariant
/// under the walk.
#[derive(Debug, Clone, Serialize)]
pub struct FurstenbergEstimate {
    pub energy: f64,
    pub lambda: f64,
    /// Bin masses over the uniform partition of `[0, π)`; sums to 1.
    pub mass: Vec<f64>,
    /// Total-variation distance between the histogram and the mean of its
    /// two pushforwards under `τ_{g_+}`, `τ_{g_−}` (bin-center re-binning,
    /// bias O(1/B)).
    pub stationarity_residual: f64,
    pub steps: u64,
}

impl FurstenbergEstimate {
    pub fn bins(&self) -> usize {
        self.mass.len()
    }

    pub fn bin_width(&self) -> f64 {
        PI / self.mass.len() as f64
    }

    /// Center of bin `i`.
    pub fn bin_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.bin_width()
    }

    /// Multinomial standard error of one bin mass.
    pub fn mass_stderr(&self, i: usize) -> f64 {
        let p = self.mass[i];
        (p * (1.0 - p) / self.steps as f64).sqrt()
    }

    /// Bin masses of the mirrored measure `θ ↦ π − θ` (bin `i ↦ B−1−i`).
    /// The potential sign-flip symmetry `v ↦ −v` sends `E ↦ −E` and mirrors
    /// the stationary measure, so this should match the estimate at `−E`.
    pub fn mirrored_mass(&self) -> Vec<f64> {
        self.mass.iter().rev().copied().collect()
    }

    /// Total-variation distance between two mass vectors.
    pub fn tv_distance(a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), b.len());
        0.5 * mc::compensated_sum(a.iter().zip(b).map(|(x, y)| (x - y).abs()))
    }
}

/// Runs the projective random walk `θ_{k+1} = τ_{g_±}(θ_k)` (each step
/// `g_+` or `g_−` with probability ½) and returns the occupation histogram
/// after burn-in. A single long orbit estimates the stationary measure; the
/// walk is contracting on average, so the occupation measure converges and
/// the residual quantifies how far it still is from stationarity.
///
/// `λ = 0` is rejected: both step matrices degenerate to the same elliptic
/// rotation-conjugate matrix and no unique stationary measure exists.
pub fn furstenberg_estimate(
    energy: f64,
    lambda: f64,
    params: &FurstenbergParams,
) -> Result<FurstenbergEstimate> {
    if !energy.is_finite() {
        return Err(Error::NonFinite("energy"));
    }
    if !lambda.is_finite() {
        return Err(Error::NonFinite("lambda"));
    }
    if lambda == 0.0 {
        return Err(Error::DegenerateCoupling);
    }
    if params.bins < 2 {
        return Err(Error::InvalidSize("need at least 2 histogram bins".into()));
    }
    if params.steps == 0 {
        return Err(Error::InvalidSize("need at least 1 recorded step".into()));
    }

    let bins = params.bins;
    let width = PI / bins as f64;
    let g_plus = transfer_step(energy, 1, lambda);
    let g_minus = transfer_step(energy, -1, lambda);

    let mut rng = trial_rng(params.seed, 0);
    let mut theta = ProjectiveAngle::new(rng.random::<f64>() * PI);
    for _ in 0..params.burn_in {
        let g = if rng.random::<bool>() { g_plus } else { g_minus };
        theta = projective_action(g, theta);
    }

    // One pass accumulates both the occupation histogram and the exact
    // binned pushforward of the empirical measure: before each step, both
    // branch images of the current direction enter the pushforward
    // histogram with weight ½, then the realized branch advances the walk.
    // Pushing the sample points themselves (rather than bin centers or
    // uniformized bin arcs) keeps the estimator consistent even though the
    // stationary measure has fractal within-bin structure that no
    // piecewise-constant smoothing captures.
    let mut counts = vec![0u64; bins];
    let mut pushed = vec![0u64; bins];
    let bin_of = |t: ProjectiveAngle| ((t.radians() / width) as usize).min(bins - 1);
    for _ in 0..params.steps {
        let up = projective_action(g_plus, theta);
        let down = projective_action(g_minus, theta);
        pushed[bin_of(up)] += 1;
        pushed[bin_of(down)] += 1;
        theta = if rng.random::<bool>() { up } else { down };
        counts[bin_of(theta)] += 1;
    }

    let mass: Vec<f64> = counts
        .iter()
        .map(|c| *c as f64 / params.steps as f64)
        .collect();
    let push: Vec<f64> = pushed
        .iter()
        .map(|c| *c as f64 / (2 * params.steps) as f64)
        .collect();
    let stationarity_residual = FurstenbergEstimate::tv_distance(&mass, &push);

    Ok(FurstenbergEstimate {
        energy,
        lambda,
        mass,
        stationarity_residual,
        steps: params.steps,
    })
}

/// `τ(ε) = max over windows I ⊆ [0, π) (circular) of width ε of ν(I)`,
/// evaluated exactly for the piecewise-constant histogram density.
///
/// The window mass is piecewise linear in the window's left edge with
/// breakpoints only where an edge crosses a bin boundary, so scanning the
/// `2B` candidate edges is exact. `ε` is clamped to π (full circle).
pub fn tau_max_interval(est: &FurstenbergEstimate, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidWindow(format!(
            "window width must be positive, got {eps}"
        )));
    }
    let eps = eps.min(PI);
    let bins = est.bins();
    let width = est.bin_width();

    // Prefix integral of the density: F(i·width) = cum[i], linear between.
    let mut cum = vec![0.0f64; bins + 1];
    for i in 0..bins {
        cum[i + 1] = cum[i] + est.mass[i];
    }
    let total = cum[bins];
    let f = |t: f64| -> f64 {
        // t in [0, π]
        if t >= PI {
            return total;
        }
        let i = ((t / width) as usize).min(bins - 1);
        cum[i] + est.mass[i] * (t - i as f64 * width) / width
    };
    let f_wrapped = |t: f64| -> f64 {
        if t >= PI {
            total + f(t - PI)
        } else {
            f(t)
        }
    };

    let mut best = 0.0f64;
    let mut consider = |t: f64| {
        let v = f_wrapped(t + eps) - f(t);
        if v > best {
            best = v;
        }
    };
    for j in 0..bins {
        consider(j as f64 * width);
        consider((j as f64 * width - eps).rem_euclid(PI).min(PI - f64::EPSILON));
    }
    Ok(best.clamp(0.0, 1.0))
}

/// A Lyapunov-exponent estimate `L̂ = mean over trials of (1/N) log‖M_N‖`,
/// with the standard error of the trial mean.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LyapunovEstimate {
    pub energy: f64,
    pub lambda: f64,
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub trials: u64,
}

/// Monte Carlo Lyapunov exponent at one energy: `T` independent potentials
/// of length `N`, one renormalized product each.
pub fn lyapunov_exponent(
    energy: f64,
    lambda: f64,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<LyapunovEstimate> {
    if !energy.is_finite() {
        return Err(Error::NonFinite("energy"));
    }
    if !lambda.is_finite() {
        return Err(Error::NonFinite("lambda"));
    }
    if n == 0 {
        return Err(Error::InvalidSize("transfer length must be >= 1".into()));
    }
    if trials < 2 {
        return Err(Error::InvalidSize(
            "need at least 2 trials for a standard error".into(),
        ));
    }
    let per_trial = mc::run_trials(trials, |t| {
        let pot = sample_potential(n, crate::rng::seed_for_trial(seed, t)).expect("n >= 1");
        let prod = transfer_product(energy, &pot, lambda).expect("inputs validated");
        prod.log_norm() / n as f64
    });
    let (value, stderr) = mc::mean_stderr(&per_trial);
    Ok(LyapunovEstimate {
        energy,
        lambda,
        value,
        stderr,
        n,
        trials,
    })
}

/// Lyapunov exponent over an energy grid; each energy draws its own
/// independent trial streams.
pub fn lyapunov_scan(
    energies: &[f64],
    lambda: f64,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<LyapunovEstimate>> {
    energies
        .iter()
        .enumerate()
        .map(|(k, e)| lyapunov_exponent(*e, lambda, n, trials, stage_seed(seed, k as u64)))
        .collect()
}

/// Empirical tail probability `P[|N⁻¹ log‖M_N‖ − l_ref| > σ]` where `l_ref`
/// is the caller's Lyapunov reference (from [`lyapunov_exponent`] at large
/// `N`).
pub fn deviation_tail(
    energy: f64,
    lambda: f64,
    n: usize,
    sigma: f64,
    trials: u64,
    l_ref: f64,
    seed: u64,
) -> Result<BinomialEstimate> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidWindow(format!(
            "deviation threshold must be nonnegative, got {sigma}"
        )));
    }
    if !l_ref.is_finite() {
        return Err(Error::NonFinite("lyapunov reference"));
    }
    if n == 0 || trials == 0 {
        return Err(Error::InvalidSize("n and trials must be >= 1".into()));
    }
    if !energy.is_finite() {
        return Err(Error::NonFinite("energy"));
    }
    if !lambda.is_finite() {
        return Err(Error::NonFinite("lambda"));
    }
    let hits = mc::run_trials(trials, |t| {
        let pot = sample_potential(n, crate::rng::seed_for_trial(seed, t)).expect("n >= 1");
        let prod = transfer_product(energy, &pot, lambda).expect("inputs validated");
        u64::from((prod.log_norm() / n as f64 - l_ref).abs() > sigma)
    });
    let successes = hits.iter().sum();
    Ok(BinomialEstimate::from_counts(successes, trials))
}

/// Large-deviation scan over increasing lengths `N`, with a weighted
/// log-linear fit `log p ≈ const − σ̂′·N`.
#[derive(Debug, Clone, Serialize)]
pub struct TailScan {
    pub ns: Vec<usize>,
    pub cells: Vec<BinomialEstimate>,
    /// Weighted fit of `ln p` against `N` over cells with ≥ 1 exceedance;
    /// `None` when fewer than two such cells exist (reported, not fatal).
    pub fit: Option<LineFit>,
    /// `σ̂′ = −slope` when the fit exists.
    pub sigma_prime_hat: Option<f64>,
    /// Number of cells with zero exceedances, excluded from the fit.
    pub dropped_zero_cells: usize,
}

/// Runs [`deviation_tail`] over an increasing grid of lengths and fits the
/// exponential decay rate of the tail.
pub fn deviation_tail_scan(
    energy: f64,
    lambda: f64,
    ns: &[usize],
    sigma: f64,
    trials: u64,
    l_ref: f64,
    seed: u64,
) -> Result<TailScan> {
    if ns.len() < 2 {
        return Err(Error::InvalidSize("need at least 2 lengths".into()));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSize("lengths must be strictly increasing".into()));
    }
    let cells: Vec<BinomialEstimate> = ns
        .iter()
        .enumerate()
        .map(|(k, n)| deviation_tail(energy, lambda, *n, sigma, trials, l_ref, stage_seed(seed, k as u64)))
        .collect::<Result<_>>()?;

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    let mut dropped = 0usize;
    for (n, cell) in ns.iter().zip(&cells) {
        if cell.successes == 0 {
            dropped += 1;
            continue;
        }
        let p = cell.probability;
        xs.push(*n as f64);
        ys.push(p.ln());
        // Delta method: Var(ln p̂) ≈ (1−p)/(T·p).
        ws.push(cell.trials as f64 * p / (1.0 - p).max(1e-12));
    }
    let fit = if xs.len() >= 2 {
        mc::weighted_line_fit(&xs, &ys, &ws)
    } else {
        None
    };
    Ok(TailScan {
        ns: ns.to_vec(),
        sigma_prime_hat: fit.map(|f| -f.slope),
        cells,
        fit,
        dropped_zero_cells: dropped,
    })
}

/// Configuration for [`angle_concentration`]. All the constants the theory
/// leaves implicit are knobs here.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AngleConcentrationConfig {
    /// Initial direction ξ (radians); default 0, i.e. the first basis vector.
    pub xi: f64,
    /// `A` in the precondition `N > A·log(1/ε)`.
    pub precondition_factor: f64,
    /// Window multiplier: the empirical probability is compared to
    /// `bound_factor · τ̂(window_factor · ε)`.
    pub window_factor: f64,
    pub bound_factor: f64,
}

impl Default for AngleConcentrationConfig {
    fn default() -> Self {
        AngleConcentrationConfig {
            xi: 0.0,
            precondition_factor: 20.0,
            window_factor: 4.0,
            bound_factor: 4.0,
        }
    }
}

/// Result of the angle-concentration experiment: the empirical probability
/// of `|⟨M_N ξ/‖M_N ξ‖, η⟩| < ε` and its comparison against the
/// Furstenberg window mass.
#[derive(Debug, Clone, Serialize)]
pub struct AngleConcentration {
    pub estimate: BinomialEstimate,
    /// Width `window_factor · ε` used for the τ̂ comparison.
    pub tau_eps: f64,
    /// `τ̂(tau_eps)` from the supplied Furstenberg estimate.
    pub tau_hat: f64,
    /// `bound_factor · τ̂`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Estimates `P[|⟨M_N ξ, η⟩| < ε ‖M_N ξ‖]` for fixed directions ξ (from
/// config) and η (`target`), and compares it with the window mass
/// `τ̂(c·ε)` of the stationary measure `est` (which fixes `E` and `λ`).
///
/// `ε = 0` is the empty event (strict inequality) and short-circuits to
/// probability 0 without simulation.
pub fn angle_concentration(
    est: &FurstenbergEstimate,
    eps: f64,
    n: usize,
    trials: u64,
    seed: u64,
    target: ProjectiveAngle,
    cfg: &AngleConcentrationConfig,
) -> Result<AngleConcentration> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::InvalidWindow(format!(
            "angle threshold must be nonnegative, got {eps}"
        )));
    }
    if n == 0 || trials == 0 {
        return Err(Error::InvalidSize("n and trials must be >= 1".into()));
    }
    if eps == 0.0 {
        // |cos| < 0 is impossible; nothing to simulate and no meaningful
        // window mass to compare against.
        return Ok(AngleConcentration {
            estimate: BinomialEstimate::from_counts(0, trials),
            tau_eps: 0.0,
            tau_hat: 0.0,
            bound: 0.0,
            within_bound: true,
        });
    }
    if eps < 1.0 {
        let needed = cfg.precondition_factor * (1.0 / eps).ln();
        if (n as f64) <= needed {
            return Err(Error::Precondition(format!(
                "angle concentration needs N > A·log(1/eps) = {needed:.1} (A = {}), got N = {n}",
                cfg.precondition_factor
            )));
        }
    }

    let xi = ProjectiveAngle::new(cfg.xi).unit_vector();
    let eta = target.unit_vector();
    let energy = est.energy;
    let lambda = est.lambda;
    let hits = mc::run_trials(trials, |t| {
        let pot = sample_potential(n, crate::rng::seed_for_trial(seed, t)).expect("n >= 1");
        let prod = transfer_product(energy, &pot, lambda).expect("inputs validated");
        let u = prod.apply_direction(xi);
        u64::from((u.0 * eta.0 + u.1 * eta.1).abs() < eps)
    });
    let estimate = BinomialEstimate::from_counts(hits.iter().sum(), trials);

    let tau_eps = (cfg.window_factor * eps).min(PI);
    let tau_hat = tau_max_interval(est, tau_eps)?;
    let bound = cfg.bound_factor * tau_hat;
    Ok(AngleConcentration {
        within_bound: estimate.probability <= bound,
        estimate,
        tau_eps,
        tau_hat,
        bound,
    })
}

/// Parameters of the uniform-norm-bound experiment: probability that the
/// *maximum* of `log‖M_N(E)‖` over an energy grid `|E − E₀| ≤ κ` exceeds
/// `(l_ref + c·κ^α)·N`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormBoundParams {
    pub energy0: f64,
    pub kappa: f64,
    /// Assumed Hölder exponent of the Lyapunov exponent (input, not output).
    pub alpha: f64,
    /// Configured prefactor of the Hölder increment.
    pub c: f64,
    pub lambda: f64,
    pub n: usize,
    pub grid_size: usize,
    pub trials: u64,
    /// Lyapunov reference at `E₀`.
    pub l_ref: f64,
    pub seed: u64,
}

/// Uniform-norm-bound result.
#[derive(Debug, Clone, Serialize)]
pub struct NormBoundEstimate {
    pub estimate: BinomialEstimate,
    /// Exceedance threshold per unit length: `l_ref + c·κ^α`.
    pub threshold_rate: f64,
    pub grid: Vec<f64>,
}

/// Runs the uniform-norm exceedance experiment. With `κ = 0` the grid
/// degenerates to the single energy `E₀` (the one-sided version of the
/// large-deviation event).
pub fn uniform_norm_bound(p: &NormBoundParams) -> Result<NormBoundEstimate> {
    if !p.energy0.is_finite() || !p.lambda.is_finite() {
        return Err(Error::NonFinite("energy or lambda"));
    }
    if !(p.kappa >= 0.0) {
        return Err(Error::InvalidWindow(format!(
            "kappa must be nonnegative, got {}",
            p.kappa
        )));
    }
    if p.n == 0 || p.trials == 0 {
        return Err(Error::InvalidSize("n and trials must be >= 1".into()));
    }
    if !p.l_ref.is_finite() {
        return Err(Error::NonFinite("lyapunov reference"));
    }
    let grid: Vec<f64> = if p.kappa == 0.0 {
        vec![p.energy0]
    } else {
        if p.grid_size < 2 {
            return Err(Error::InvalidSize(
                "grid_size must be >= 2 for a nondegenerate energy interval".into(),
            ));
        }
        (0..p.grid_size)
            .map(|i| {
                p.energy0 - p.kappa
                    + 2.0 * p.kappa * i as f64 / (p.grid_size - 1) as f64
            })
            .collect()
    };
    let threshold_rate = p.l_ref + p.c * p.kappa.powf(p.alpha);
    let threshold = threshold_rate * p.n as f64;

    let n = p.n;
    let lambda = p.lambda;
    let seed = p.seed;
    let grid_ref = &grid;
    let hits = mc::run_trials(p.trials, move |t| {
        let pot = sample_potential(n, crate::rng::seed_for_trial(seed, t)).expect("n >= 1");
        let exceeded = grid_ref.iter().any(|e| {
            let prod = transfer_product(*e, &pot, lambda).expect("inputs validated");
            prod.log_norm() > threshold
        });
        u64::from(exceeded)
    });
    Ok(NormBoundEstimate {
        estimate: BinomialEstimate::from_counts(hits.iter().sum(), p.trials),
        threshold_rate,
        grid,
    })
}

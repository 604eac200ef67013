//! Monte Carlo plumbing shared by the estimators: order-preserving parallel
//! trial execution, compensated summation, binomial error bars and weighted
//! log-log line fits.
//!
//! The reduction discipline matters more than it looks: `rayon`'s
//! `collect()` preserves trial order, and all sums run sequentially over
//! that order with Neumaier compensation, so results do not depend on the
//! thread count.

use rayon::prelude::*;
use serde::Serialize;

/// Runs `trials` independent trials in parallel; the result vector is in
/// trial order regardless of scheduling.
pub fn run_trials<T, F>(trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

/// Neumaier-compensated sum (Kahan variant robust to cancellation).
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and standard error of the mean.
///
/// Requires at least two values; the standard error uses the unbiased
/// sample variance.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    assert!(xs.len() >= 2, "mean_stderr needs at least 2 samples");
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    let ss = compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    let var = ss / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Normal-approximation standard error of a binomial proportion,
/// `sqrt(p(1-p)/n)`.
pub fn binomial_stderr(successes: u64, trials: u64) -> f64 {
    assert!(trials > 0);
    let p = successes as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Wilson score interval for a binomial proportion.
///
/// Behaves sensibly at 0 and `n` successes, unlike the Wald interval, which
/// matters for the rare-event tails estimated here.
pub fn binomial_ci(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// An empirical probability with its uncertainty: normal-approximation
/// standard error plus a Wilson 95% interval (honest near 0 and 1).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BinomialEstimate {
    pub successes: u64,
    pub trials: u64,
    pub probability: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
}

impl BinomialEstimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        assert!(trials > 0, "binomial estimate needs at least one trial");
        assert!(successes <= trials);
        BinomialEstimate {
            successes,
            trials,
            probability: successes as f64 / trials as f64,
            stderr: binomial_stderr(successes, trials),
            ci95: binomial_ci(successes, trials, 1.96),
        }
    }
}

/// A fitted line `y = intercept + slope * x` with the standard error of the
/// slope under the supplied weights.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    /// Root-mean-square of the weighted residuals (≈1 when the error model
    /// is honest).
    pub residual_rms: f64,
}

/// Weighted least-squares line fit. Weights are inverse variances
/// (`w_i = 1/σ_i²`). Returns `None` with fewer than two points or when the
/// abscissae are degenerate.
pub fn weighted_line_fit(x: &[f64], y: &[f64], w: &[f64]) -> Option<LineFit> {
    assert_eq!(x.len(), y.len());
    assert_eq!(x.len(), w.len());
    if x.len() < 2 {
        return None;
    }
    let sw = compensated_sum(w.iter().copied());
    if !(sw > 0.0) {
        return None;
    }
    let xbar = compensated_sum(x.iter().zip(w).map(|(x, w)| x * w)) / sw;
    let ybar = compensated_sum(y.iter().zip(w).map(|(y, w)| y * w)) / sw;
    let sxx = compensated_sum(x.iter().zip(w).map(|(x, w)| w * (x - xbar) * (x - xbar)));
    if sxx <= 0.0 {
        return None;
    }
    let sxy = compensated_sum(
        x.iter()
            .zip(y)
            .zip(w)
            .map(|((x, y), w)| w * (x - xbar) * (y - ybar)),
    );
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let rss = compensated_sum(x.iter().zip(y).zip(w).map(|((x, y), w)| {
        let r = y - intercept - slope * x;
        w * r * r
    }));
    let dof = (x.len() as f64 - 2.0).max(1.0);
    Some(LineFit {
        slope,
        slope_stderr: (1.0 / sxx).sqrt(),
        intercept,
        residual_rms: (rss / dof).sqrt(),
    })
}

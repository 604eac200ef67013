//! Eigenvalue machinery for the truncated Hamiltonians: Sturm counting,
//! window eigensolves (bisection + inverse iteration), Dirichlet
//! sub-restrictions, the integrated density of states, and localization
//! diagnostics.
//!
//! Everything here works directly on the symmetric tridiagonal form with
//! unit off-diagonal — no dense matrices. Dense diagonalization appears
//! only as a small-`N` oracle in the test suite.

use serde::Serialize;

use crate::error::Error;
use crate::mc;
use crate::model::{build_hamiltonian, sample_potential, TridiagonalHamiltonian};
use crate::rng::seed_for_trial;
use crate::Result;

/// Number of eigenvalues of `H` strictly below `energy`, by counting
/// negative pivots of the Sturm (LDLᵀ) recurrence
/// `d_i = (a_i − E) − 1/d_{i−1}`.
///
/// Zero/tiny pivots are replaced by `±1e−300·scale` (classical safeguard;
/// without it an eigenvalue exactly at a query point breaks the count).
pub fn sturm_count(h: &TridiagonalHamiltonian, energy: f64) -> usize {
    assert!(energy.is_finite(), "sturm_count needs a finite energy");
    let tiny = 1e-300 * h.gershgorin_bound().max(1.0);
    let mut count = 0usize;
    let mut prev: f64 = 0.0; // 1/d term; zero for the first pivot
    for &a in h.diagonal() {
        let mut d = (a - energy) - prev;
        if d.abs() < tiny {
            // Sign convention: an exact tie counts as "below".
            d = if d > 0.0 { tiny } else { -tiny };
        }
        if d < 0.0 {
            count += 1;
        }
        prev = 1.0 / d;
    }
    count
}

/// Eigenvalues (and optionally eigenvectors) of `H` inside an energy
/// window, plus the Sturm counts at the window endpoints.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralWindowResult {
    /// Eigenvalues in nondecreasing order (strictly increasing for simple
    /// spectrum, which holds almost surely for random diagonals).
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors (2-norm 1), aligned with `eigenvalues`, sign fixed
    /// so the largest-magnitude entry is positive.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    /// `(sturm_count(a), sturm_count(b))` at the window `[a, b)`.
    pub counts_below: (usize, usize),
    pub window: (f64, f64),
    /// Lattice interval of the underlying Hamiltonian (for mapping vector
    /// entries back to absolute sites).
    pub interval: (usize, usize),
}

impl SpectralWindowResult {
    /// Number of eigenvalues found.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Relative bisection tolerance (times the Gershgorin norm bound).
const BISECT_TOL: f64 = 1e-12;
/// Residual margin used by inverse iteration; the contract is 1e−10·‖H‖.
const RESIDUAL_TOL: f64 = 1e-11;
/// Two shifts closer than this are treated as a degenerate cluster and
/// re-orthogonalized.
const CLUSTER_TOL: f64 = 1e-10;

/// All eigenvalues of `H` in `[a, b)`, isolated by bisection on
/// [`sturm_count`] to `1e−12·‖H‖`, with optional eigenvectors from inverse
/// iteration (50 iterations, retry with perturbed shift, then fail loudly).
pub fn eigen_window(
    h: &TridiagonalHamiltonian,
    window: (f64, f64),
    want_vectors: bool,
) -> Result<SpectralWindowResult> {
    let (a, b) = window;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite("window endpoint"));
    }
    if a >= b {
        return Err(Error::InvalidWindow(format!(
            "window [{a}, {b}] must satisfy a < b"
        )));
    }
    let scale = h.gershgorin_bound();
    let tol = BISECT_TOL * scale;
    let ca = sturm_count(h, a);
    let cb = sturm_count(h, b);

    let mut eigenvalues = Vec::with_capacity(cb - ca);
    for k in ca..cb {
        let (mut lo, mut hi) = (a, b);
        // Invariant: count(lo) <= k < count(hi).
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break; // f64 resolution reached
            }
            if sturm_count(h, mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        eigenvalues.push(0.5 * (lo + hi));
    }

    let eigenvectors = if want_vectors {
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(eigenvalues.len());
        for (i, &ev) in eigenvalues.iter().enumerate() {
            // Indices of already-computed vectors in the same near-tie
            // cluster; inverse iteration alone cannot separate those.
            let cluster_start = (0..i)
                .rev()
                .take_while(|j| ev - eigenvalues[*j] < CLUSTER_TOL * scale.max(1.0))
                .last()
                .unwrap_or(i);
            let cluster = &vectors[cluster_start..i];
            let v = inverse_iteration(h, ev, i, cluster)?;
            vectors.push(v);
        }
        Some(vectors)
    } else {
        None
    };

    Ok(SpectralWindowResult {
        eigenvalues,
        eigenvectors,
        counts_below: (ca, cb),
        window,
        interval: h.interval(),
    })
}

/// Deterministic pseudo-random unit start vector for inverse iteration
/// (keyed, so results are identical across runs and thread counts).
fn seeded_unit_vector(n: usize, key: u64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let h = seed_for_trial(0x1DEA_5EED_0BAD_F00D ^ key, i as u64);
            (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        })
        .collect();
    let norm = l2_norm(&v);
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

fn l2_norm(v: &[f64]) -> f64 {
    mc::compensated_sum(v.iter().map(|x| x * x)).sqrt()
}

/// One inverse-iteration solve: computes the unit eigenvector for the shift
/// `ev`, orthogonalized (modified Gram–Schmidt) against earlier vectors of
/// a degenerate cluster when present.
fn inverse_iteration(
    h: &TridiagonalHamiltonian,
    ev: f64,
    index: usize,
    cluster: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let n = h.size();
    let scale = h.gershgorin_bound();
    let res_tol = RESIDUAL_TOL * scale.max(1.0);

    for attempt in 0..4u32 {
        // Perturb the shift a little past the bisection uncertainty on
        // retries; the eigenvalue used for the residual stays `ev`.
        let shift = ev + attempt as f64 * 20.0 * BISECT_TOL * scale;
        let mut v = seeded_unit_vector(n, index as u64 ^ (u64::from(attempt) << 56));
        let mut ok = true;
        for _ in 0..50 {
            let mut x = match solve_shifted(h, shift, &v) {
                Some(x) => x,
                None => {
                    ok = false;
                    break;
                }
            };
            let norm = l2_norm(&x);
            if !norm.is_finite() || norm == 0.0 {
                ok = false;
                break;
            }
            x.iter_mut().for_each(|y| *y /= norm);
            // Degenerate near-ties: project out the cluster before the
            // residual test so we converge to a *new* basis vector.
            for prev in cluster {
                let dot: f64 = mc::compensated_sum(x.iter().zip(prev).map(|(a, b)| a * b));
                x.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
            }
            let norm = l2_norm(&x);
            if norm < 1e-8 {
                // The solve collapsed onto the span of the earlier cluster
                // vectors; retry with a different start.
                ok = false;
                break;
            }
            x.iter_mut().for_each(|y| *y /= norm);

            let hx = h.apply(&x);
            let residual = l2_norm(
                &hx.iter()
                    .zip(&x)
                    .map(|(hy, y)| hy - ev * y)
                    .collect::<Vec<_>>(),
            );
            v = x;
            if residual <= res_tol {
                canonicalize_sign(&mut v);
                return Ok(v);
            }
        }
        let _ = ok;
    }
    Err(Error::InverseIteration { index, shift: ev })
}

/// Fixes the overall sign: the entry of largest magnitude (first on ties)
/// is made positive. Keeps output byte-stable across runs.
fn canonicalize_sign(v: &mut [f64]) {
    let mut idx = 0;
    let mut best = 0.0f64;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Solves `(H − shift)x = b` by Gaussian elimination with partial pivoting,
/// specialized to the unit-off-diagonal tridiagonal form (the subdiagonal
/// entry is always 1 when its row is eliminated, so the pivot test is just
/// `|d| ≥ 1`). Returns `None` if a non-finite value appears.
fn solve_shifted(h: &TridiagonalHamiltonian, shift: f64, rhs: &[f64]) -> Option<Vec<f64>> {
    let n = h.size();
    debug_assert_eq!(rhs.len(), n);
    let mut d: Vec<f64> = h.diagonal().iter().map(|a| a - shift).collect();
    let mut b = rhs.to_vec();
    if n == 1 {
        let piv = guard_pivot(d[0], h.gershgorin_bound());
        return Some(vec![b[0] / piv]);
    }
    let mut u1 = vec![1.0f64; n - 1]; // (k, k+1)
    let mut u2 = vec![0.0f64; n.saturating_sub(2)]; // (k, k+2), fill-in from swaps

    for k in 0..n - 1 {
        if d[k].abs() >= 1.0 {
            // No swap; subdiagonal entry is 1, multiplier 1/d[k].
            let m = 1.0 / d[k];
            d[k + 1] -= m * u1[k];
            if k + 1 < n - 1 {
                u1[k + 1] -= m * u2[k];
            }
            let t = m * b[k];
            b[k + 1] -= t;
        } else {
            // Swap rows k and k+1; pivot becomes the unit subdiagonal.
            let m = d[k];
            let old_dk1 = d[k + 1];
            let old_u1k = u1[k];
            let old_u2k = if k < n.saturating_sub(2) { u2[k] } else { 0.0 };
            let old_u1k1 = if k + 1 < n - 1 { u1[k + 1] } else { 0.0 };
            d[k] = 1.0;
            u1[k] = old_dk1;
            if k < n.saturating_sub(2) {
                u2[k] = old_u1k1;
            }
            d[k + 1] = old_u1k - m * old_dk1;
            if k + 1 < n - 1 {
                u1[k + 1] = old_u2k - m * old_u1k1;
            }
            b.swap(k, k + 1);
            let t = m * b[k];
            b[k + 1] -= t;
        }
        if !d[k + 1].is_finite() || !b[k + 1].is_finite() {
            return None;
        }
    }
    d[n - 1] = guard_pivot(d[n - 1], h.gershgorin_bound());

    // Back substitution.
    let mut x = vec![0.0f64; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n >= 2 {
        x[n - 2] = (b[n - 2] - u1[n - 2] * x[n - 1]) / d[n - 2];
    }
    for k in (0..n.saturating_sub(2)).rev() {
        x[k] = (b[k] - u1[k] * x[k + 1] - u2[k] * x[k + 2]) / d[k];
    }
    if x.iter().any(|y| !y.is_finite()) {
        return None;
    }
    Some(x)
}

/// The final pivot is the only one that can be arbitrarily small (that is
/// exactly when the shift is an eigenvalue — the useful case for inverse
/// iteration). Keep it finite and sign-consistent.
fn guard_pivot(d: f64, scale: f64) -> f64 {
    let tiny = 1e-30 * scale.max(1.0);
    if d.abs() >= tiny {
        d
    } else if d >= 0.0 {
        tiny
    } else {
        -tiny
    }
}

/// Dirichlet restriction of `H` to a sub-interval (absolute lattice
/// indices): the same potential entries, boundary forced to zero outside.
pub fn restrict(
    h: &TridiagonalHamiltonian,
    sub: (usize, usize),
) -> Result<TridiagonalHamiltonian> {
    let (a, b) = sub;
    let (lo, hi) = h.interval();
    if a > b {
        return Err(Error::InvalidSize(format!(
            "empty sub-interval [{a}, {b}]"
        )));
    }
    if a < lo || b > hi {
        return Err(Error::IntervalOutOfBounds {
            lo: a,
            hi: b,
            host_lo: lo,
            host_hi: hi,
        });
    }
    let diag = h.diagonal()[(a - lo)..=(b - lo)].to_vec();
    TridiagonalHamiltonian::from_diagonal(diag, a)
}

/// Closed-form spectrum of the free (`λ = 0`) Dirichlet Laplacian on `N`
/// sites: `2cos(kπ/(N+1))`, `k = 1..N`, returned in increasing order.
pub fn free_laplacian_eigenvalues(n: usize) -> Vec<f64> {
    (1..=n)
        .rev()
        .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
        .collect()
}

/// Closed-form integrated density of states of the free Laplacian:
/// `1 − arccos(E/2)/π` on `[−2, 2]`, clamped outside.
pub fn free_ids(energy: f64) -> f64 {
    if energy <= -2.0 {
        0.0
    } else if energy >= 2.0 {
        1.0
    } else {
        1.0 - (energy / 2.0).acos() / std::f64::consts::PI
    }
}

/// Parameters for [`ids_dos`].
#[derive(Debug, Clone, Serialize)]
pub struct IdsParams {
    pub lambda: f64,
    pub n: usize,
    pub trials: u64,
    /// Strictly increasing energy grid.
    pub energies: Vec<f64>,
    /// Central-difference bandwidth; default `max(4/N, 5·stderr)`.
    pub bandwidth: Option<f64>,
    pub seed: u64,
}

/// Monte Carlo integrated density of states `𝒩̂(E) = E[sturm_count(H_N, E)]/N`
/// over an energy grid, with the finite-difference density of states.
#[derive(Debug, Clone, Serialize)]
pub struct IdsCurve {
    pub energies: Vec<f64>,
    /// `𝒩̂` values in `[0, 1]`, nondecreasing along the grid (exactly:
    /// the underlying counts are monotone in `E` per realization and summed
    /// in integers).
    pub ids: Vec<f64>,
    /// Standard error of each `ids` value.
    pub stderr: Vec<f64>,
    /// Central difference `(𝒩̂(E+h) − 𝒩̂(E−h))/(2h)`; `None` when the
    /// bandwidth failed the noise validation (flagged, not an error).
    pub dos: Option<Vec<f64>>,
    pub n: usize,
    pub trials: u64,
    /// Bandwidth actually used.
    pub bandwidth: f64,
    /// Whether `bandwidth ≥ 5·stderr` held at every grid point.
    pub bandwidth_ok: bool,
}

impl IdsCurve {
    /// Trapezoid integral of the DOS over the grid (≈ 1 when the grid
    /// covers the whole spectrum).
    pub fn dos_integral(&self) -> Option<f64> {
        let dos = self.dos.as_ref()?;
        let mut total = 0.0;
        for i in 1..self.energies.len() {
            total += 0.5 * (dos[i] + dos[i - 1]) * (self.energies[i] - self.energies[i - 1]);
        }
        Some(total)
    }

    /// DOS value at the grid point nearest to `energy`.
    pub fn dos_at(&self, energy: f64) -> Option<f64> {
        let dos = self.dos.as_ref()?;
        let idx = self
            .energies
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (*a - energy).abs().total_cmp(&(*b - energy).abs()))
            .map(|(i, _)| i)?;
        Some(dos[idx])
    }
}

/// Estimates IDS and DOS by averaging Sturm counts over disorder.
///
/// The DOS bandwidth must dominate the Monte Carlo noise
/// (`h ≥ 5·stderr`); with an explicit bandwidth that fails this check the
/// DOS is withheld and `bandwidth_ok` is set to `false`.
pub fn ids_dos(params: &IdsParams) -> Result<IdsCurve> {
    if params.n == 0 {
        return Err(Error::InvalidSize("matrix size must be >= 1".into()));
    }
    if params.trials < 2 {
        return Err(Error::InvalidSize("need at least 2 trials".into()));
    }
    if params.energies.is_empty() {
        return Err(Error::InvalidSize("energy grid is empty".into()));
    }
    if params.energies.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSize(
            "energy grid must be strictly increasing".into(),
        ));
    }
    if params.energies.iter().any(|e| !e.is_finite()) || !params.lambda.is_finite() {
        return Err(Error::NonFinite("ids grid or lambda"));
    }
    if let Some(h) = params.bandwidth {
        if !(h > 0.0) {
            return Err(Error::InvalidWindow(format!(
                "bandwidth must be positive, got {h}"
            )));
        }
    }

    let n = params.n;
    let lambda = params.lambda;
    let seed = params.seed;
    let grid = &params.energies;

    // Pass 1: counts at the grid points. Integer accumulation keeps the
    // result exact and therefore identical for any thread count.
    let per_trial: Vec<Vec<u32>> = mc::run_trials(params.trials, |t| {
        let pot = sample_potential(n, seed_for_trial(seed, t)).expect("n >= 1");
        let h = build_hamiltonian(&pot, lambda, (1, n)).expect("interval valid");
        grid.iter().map(|e| sturm_count(&h, *e) as u32).collect()
    });
    let trials_f = params.trials as f64;
    let nf = n as f64;
    let mut ids = Vec::with_capacity(grid.len());
    let mut stderr = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let sum: u64 = per_trial.iter().map(|row| row[j] as u64).sum();
        let sumsq: u128 = per_trial
            .iter()
            .map(|row| (row[j] as u128) * (row[j] as u128))
            .sum();
        let mean = sum as f64 / trials_f;
        let var = ((sumsq as f64) - (sum as f64) * mean) / (trials_f - 1.0);
        ids.push(mean / nf);
        stderr.push((var.max(0.0) / trials_f).sqrt() / nf);
    }
    let max_stderr = stderr.iter().copied().fold(0.0f64, f64::max);

    let bandwidth = params
        .bandwidth
        .unwrap_or_else(|| (4.0 / nf).max(5.0 * max_stderr));
    let bandwidth_ok = bandwidth >= 5.0 * max_stderr;

    // Pass 2: counts at E ± h (same per-trial potentials via the same
    // seeds), only when the bandwidth is trustworthy.
    let dos = if bandwidth_ok {
        let h = bandwidth;
        let per_trial_pm: Vec<Vec<(u32, u32)>> = mc::run_trials(params.trials, |t| {
            let pot = sample_potential(n, seed_for_trial(seed, t)).expect("n >= 1");
            let ham = build_hamiltonian(&pot, lambda, (1, n)).expect("interval valid");
            grid.iter()
                .map(|e| {
                    (
                        sturm_count(&ham, *e - h) as u32,
                        sturm_count(&ham, *e + h) as u32,
                    )
                })
                .collect()
        });
        let mut dos = Vec::with_capacity(grid.len());
        for j in 0..grid.len() {
            let lo: u64 = per_trial_pm.iter().map(|row| row[j].0 as u64).sum();
            let hi: u64 = per_trial_pm.iter().map(|row| row[j].1 as u64).sum();
            // Counts are monotone in E per realization, so hi >= lo and the
            // noise-floor clamp at 0 is a no-op kept for clarity.
            let diff = (hi as f64 - lo as f64).max(0.0);
            dos.push(diff / (trials_f * nf * 2.0 * h));
        }
        Some(dos)
    } else {
        None
    };

    Ok(IdsCurve {
        energies: grid.clone(),
        ids,
        stderr,
        dos,
        n,
        trials: params.trials,
        bandwidth,
        bandwidth_ok,
    })
}

/// Localization diagnostics for one eigenvector: the center (argmax of
/// `|ξ|`, ties toward the smaller index) and the exponential decay fit.
#[derive(Debug, Clone, Serialize)]
pub struct LocalizationFit {
    pub eigenvalue: f64,
    /// Absolute lattice index of the localization center.
    pub center: usize,
    /// `−slope` of the least-squares line `log|ξ(j)| ~ |j − center|` over
    /// `|j − center| > M/10`; `None` when the window leaves no usable
    /// decay range.
    pub decay_rate: Option<f64>,
    /// RMS residual of that fit.
    pub fit_residual: Option<f64>,
}

/// Computes localization centers and decay fits for every eigenvector in
/// the result. Requires eigenvectors to be present.
pub fn localization_centers(result: &SpectralWindowResult) -> Result<Vec<LocalizationFit>> {
    let vectors = result
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::Precondition("localization_centers needs eigenvectors".into()))?;
    let m = (result.interval.1 - result.interval.0 + 1) as f64;
    let cutoff = m / 10.0;

    let mut fits = Vec::with_capacity(vectors.len());
    for (ev, v) in result.eigenvalues.iter().zip(vectors) {
        let mut center = 0usize;
        let mut best = 0.0f64;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > best {
                best = x.abs();
                center = i;
            }
        }

        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, x) in v.iter().enumerate() {
            let dist = (i as f64 - center as f64).abs();
            if dist > cutoff && x.abs() > 0.0 {
                let ln = x.abs().ln();
                if ln.is_finite() {
                    xs.push(dist);
                    ys.push(ln);
                }
            }
        }
        let ws = vec![1.0; xs.len()];
        let fit = mc::weighted_line_fit(&xs, &ys, &ws);
        fits.push(LocalizationFit {
            eigenvalue: *ev,
            center: result.interval.0 + center,
            decay_rate: fit.map(|f| -f.slope),
            fit_residual: fit.map(|f| f.residual_rms),
        });
    }
    Ok(fits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PotentialRealization;
    use approx::assert_relative_eq;

    fn random_hamiltonian(n: usize, lambda: f64, seed: u64) -> TridiagonalHamiltonian {
        let pot = sample_potential(n, seed).unwrap();
        build_hamiltonian(&pot, lambda, (1, n)).unwrap()
    }

    #[test]
    fn sturm_count_hits_gershgorin_extremes() {
        let h = random_hamiltonian(50, 0.5, 1);
        assert_eq!(sturm_count(&h, -3.5), 0);
        assert_eq!(sturm_count(&h, 3.5), 50);
    }

    #[test]
    fn sturm_count_is_monotone() {
        let h = random_hamiltonian(40, 1.0, 2);
        let mut prev = 0;
        let mut e = -3.2;
        while e < 3.2 {
            let c = sturm_count(&h, e);
            assert!(c >= prev);
            prev = c;
            e += 0.05;
        }
    }

    #[test]
    fn free_laplacian_is_symmetric_about_zero() {
        let pot = sample_potential(100, 1).unwrap();
        let h = build_hamiltonian(&pot, 0.0, (1, 100)).unwrap();
        assert_eq!(sturm_count(&h, 0.0), 50);
    }

    #[test]
    fn free_laplacian_eigenvalues_match_closed_form() {
        let pot = sample_potential(100, 1).unwrap();
        let h = build_hamiltonian(&pot, 0.0, (1, 100)).unwrap();
        let result = eigen_window(&h, (-2.5, 2.5), false).unwrap();
        let exact = free_laplacian_eigenvalues(100);
        assert_eq!(result.len(), 100);
        for (got, want) in result.eigenvalues.iter().zip(&exact) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn empty_window_between_eigenvalues() {
        let pot = sample_potential(8, 4).unwrap();
        let h = build_hamiltonian(&pot, 0.0, (1, 8)).unwrap();
        let ev = free_laplacian_eigenvalues(8);
        // A window strictly inside a spectral gap must return nothing.
        let mid = 0.5 * (ev[3] + ev[4]);
        let r = eigen_window(&h, (mid - 1e-6, mid + 1e-6), false).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.counts_below, (4, 4));
    }

    #[test]
    fn eigen_window_validates_input() {
        let h = random_hamiltonian(10, 0.5, 5);
        assert!(eigen_window(&h, (1.0, 1.0), false).is_err());
        assert!(eigen_window(&h, (2.0, 1.0), false).is_err());
        assert!(eigen_window(&h, (f64::NAN, 1.0), false).is_err());
    }

    #[test]
    fn eigenvector_residuals_meet_contract() {
        let h = random_hamiltonian(1000, 0.5, 7);
        let r = eigen_window(&h, (0.4, 0.6), true).unwrap();
        assert!(!r.is_empty(), "expected eigenvalues near the band center");
        let bound = 1e-10 * h.gershgorin_bound();
        let vectors = r.eigenvectors.as_ref().unwrap();
        for (ev, v) in r.eigenvalues.iter().zip(vectors) {
            let hv = h.apply(v);
            let res = hv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - ev * b) * (a - ev * b))
                .sum::<f64>()
                .sqrt();
            assert!(res < bound, "residual {res} vs bound {bound}");
            assert_relative_eq!(
                v.iter().map(|x| x * x).sum::<f64>().sqrt(),
                1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn window_splitting_concatenates() {
        let h = random_hamiltonian(60, 0.7, 9);
        let full = eigen_window(&h, (-1.0, 1.0), false).unwrap();
        let left = eigen_window(&h, (-1.0, 0.1), false).unwrap();
        let right = eigen_window(&h, (0.1, 1.0), false).unwrap();
        let glued: Vec<f64> = left
            .eigenvalues
            .iter()
            .chain(right.eigenvalues.iter())
            .copied()
            .collect();
        assert_eq!(full.len(), glued.len());
        for (a, b) in full.eigenvalues.iter().zip(&glued) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn restriction_behaves_like_a_projection() {
        let h = random_hamiltonian(20, 0.5, 11);
        let full = restrict(&h, (1, 20)).unwrap();
        assert_eq!(&full, &h);
        let once = restrict(&h, (3, 15)).unwrap();
        let twice = restrict(&once, (5, 12)).unwrap();
        let direct = restrict(&h, (5, 12)).unwrap();
        assert_eq!(twice, direct);
        assert!(restrict(&h, (0, 5)).is_err());
        assert!(restrict(&h, (5, 21)).is_err());
        assert!(restrict(&h, (9, 8)).is_err());
    }

    #[test]
    fn split_counts_differ_by_at_most_two() {
        // Decoupling [1,N] into [1,j] ⊕ [j+1,N] removes one hopping bond —
        // a rank-2 perturbation — so Sturm counts at any energy move by at
        // most 2.
        let h = random_hamiltonian(64, 0.8, 13);
        let left = restrict(&h, (1, 30)).unwrap();
        let right = restrict(&h, (31, 64)).unwrap();
        for e in [-2.1, -1.0, -0.3, 0.0, 0.4, 1.2, 2.2] {
            let full = sturm_count(&h, e) as i64;
            let split = (sturm_count(&left, e) + sturm_count(&right, e)) as i64;
            assert!((full - split).abs() <= 2, "at E={e}: {full} vs {split}");
        }
    }

    #[test]
    fn ids_matches_free_laplacian_closed_form() {
        let params = IdsParams {
            lambda: 0.0,
            n: 100,
            trials: 4,
            energies: vec![-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5],
            bandwidth: None,
            seed: 3,
        };
        let curve = ids_dos(&params).unwrap();
        for (e, ids) in curve.energies.iter().zip(&curve.ids) {
            // λ=0 is deterministic: stderr is 0 and the count itself is
            // within 1/N of the closed form.
            assert!(
                (ids - free_ids(*e)).abs() <= 1.0 / 100.0 + 1e-12,
                "ids({e}) = {ids} vs {}",
                free_ids(*e)
            );
        }
        assert!(curve.bandwidth_ok);
    }

    #[test]
    fn ids_is_monotone_and_bounded() {
        let params = IdsParams {
            lambda: 0.5,
            n: 80,
            trials: 64,
            energies: (0..25).map(|i| -3.0 + 0.25 * i as f64).collect(),
            bandwidth: None,
            seed: 5,
        };
        let curve = ids_dos(&params).unwrap();
        for w in curve.ids.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert!(curve.ids.iter().all(|x| (0.0..=1.0).contains(x)));
        let dos = curve.dos.as_ref().unwrap();
        assert!(dos.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn undersized_bandwidth_withholds_dos() {
        let params = IdsParams {
            lambda: 0.5,
            n: 50,
            trials: 16,
            energies: vec![0.0, 0.5],
            bandwidth: Some(1e-9),
            seed: 6,
        };
        let curve = ids_dos(&params).unwrap();
        assert!(!curve.bandwidth_ok);
        assert!(curve.dos.is_none());
    }

    #[test]
    fn localization_fit_recovers_synthetic_decay() {
        let n = 100usize;
        let center = 40usize;
        let rate = 0.3f64;
        let mut v: Vec<f64> = (0..n)
            .map(|j| (-rate * (j as f64 - center as f64).abs()).exp())
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let result = SpectralWindowResult {
            eigenvalues: vec![0.0],
            eigenvectors: Some(vec![v]),
            counts_below: (0, 1),
            window: (-1.0, 1.0),
            interval: (1, n),
        };
        let fits = localization_centers(&result).unwrap();
        assert_eq!(fits[0].center, 1 + center);
        let rate_hat = fits[0].decay_rate.unwrap();
        assert!((rate_hat - 0.3).abs() < 0.01, "rate {rate_hat}");
    }

    #[test]
    fn delta_vector_has_no_decay_fit() {
        let mut v = vec![0.0; 50];
        v[17] = 1.0;
        let result = SpectralWindowResult {
            eigenvalues: vec![0.0],
            eigenvectors: Some(vec![v]),
            counts_below: (0, 1),
            window: (-1.0, 1.0),
            interval: (1, 50),
        };
        let fits = localization_centers(&result).unwrap();
        assert_eq!(fits[0].center, 18);
        assert!(fits[0].decay_rate.is_none());
    }

    #[test]
    fn localization_requires_vectors() {
        let result = SpectralWindowResult {
            eigenvalues: vec![0.0],
            eigenvectors: None,
            counts_below: (0, 1),
            window: (-1.0, 1.0),
            interval: (1, 10),
        };
        assert!(matches!(
            localization_centers(&result),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn degenerate_pair_is_resolved_orthogonally() {
        // Two wells separated by a high barrier: the two lowest eigenvalues
        // are split far below bisection resolution, forcing the cluster
        // (MGS) path in inverse iteration.
        let n = 60;
        let mut diag = vec![30.0; n];
        diag[19] = 0.0;
        diag[39] = 0.0;
        let h = TridiagonalHamiltonian::from_diagonal(diag, 1).unwrap();
        let r = eigen_window(&h, (-1.0, 1.0), true).unwrap();
        assert_eq!(r.len(), 2);
        let v = r.eigenvectors.as_ref().unwrap();
        let dot: f64 = v[0].iter().zip(&v[1]).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-8, "eigenvectors not orthogonal: {dot}");
        let bound = 1e-10 * h.gershgorin_bound();
        for (ev, vec) in r.eigenvalues.iter().zip(v) {
            let hv = h.apply(vec);
            let res = hv
                .iter()
                .zip(vec)
                .map(|(a, b)| (a - ev * b) * (a - ev * b))
                .sum::<f64>()
                .sqrt();
            assert!(res < bound, "residual {res}");
        }
    }

    #[test]
    fn solve_shifted_matches_direct_apply() {
        let pot = PotentialRealization::from_values(vec![1, -1, 1, 1, -1, -1, 1]).unwrap();
        let h = build_hamiltonian(&pot, 0.7, (1, 7)).unwrap();
        let rhs = vec![0.3, -1.0, 2.0, 0.0, 1.5, -0.2, 0.8];
        let x = solve_shifted(&h, 0.123, &rhs).unwrap();
        // (H - s) x should reproduce the rhs.
        let hx = h.apply(&x);
        for i in 0..7 {
            assert_relative_eq!(hx[i] - 0.123 * x[i], rhs[i], epsilon = 1e-9);
        }
    }
}

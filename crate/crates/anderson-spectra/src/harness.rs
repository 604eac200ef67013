//! JSON-configured experiment runner behind the `anderson-spectra` binary.
//!
//! A run is described by one JSON object whose `"experiment"` tag selects
//! the experiment (`validate-coupling`, `lyapunov`, `furstenberg`, `ids`,
//! `wegner`, `trace`, `minami`, `resonance`, `poisson`); the remaining keys
//! are that experiment's parameters. Unknown experiment names and unknown
//! keys are rejected at parse time; omitted optional keys take the
//! documented defaults and the *resolved* configuration (defaults and
//! overrides included) is embedded in the output, so a previous summary
//! file can itself be passed back as `--config` to rerun the experiment.
//!
//! Artifacts per run: one or more CSV files for array-like data and a
//! `<experiment>_summary.json` holding the version string, the resolved
//! config, wall time, scalar results, and the artifact list. Numerical
//! failures flush a `<experiment>_error.json` before propagating.
//!
//! Outputs are byte-identical for a fixed config regardless of the worker
//! thread count (`--threads`, or the `ANDERSON_SPECTRA_THREADS` fallback):
//! trials use keyed per-trial streams and reductions are order-fixed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::model::{validate_coupling, CouplingSpec};
use crate::spectrum::{ids_dos, IdsParams};
use crate::stats::{
    expected_trace, minami_scan, near_resonance_scan, poisson_tests, rescaled_samples,
    wegner_scan, PoissonTestConfig, ScalingExperiment,
};
use crate::transfer::{furstenberg_estimate, lyapunov_scan, FurstenbergParams};
use crate::Result;

/// Environment variable consulted for the worker count when `--threads`
/// is not given.
pub const THREADS_ENV: &str = "ANDERSON_SPECTRA_THREADS";

fn default_seed() -> u64 {
    0
}
fn default_bins() -> usize {
    512
}
fn default_burn_in() -> u64 {
    1_000
}
fn default_steps() -> u64 {
    1_000_000
}
fn default_c() -> f64 {
    1.0
}
fn default_exponent() -> f64 {
    10.0
}
fn default_bootstrap_reps() -> u32 {
    500
}

/// One experiment descriptor: the `"experiment"` tag plus flat parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    /// Checks the algebraic coupling conditions of a `CouplingSpec`.
    ValidateCoupling {
        lambda: f64,
        poly: Vec<i64>,
        #[serde(rename = "C")]
        coeff_bound_exponent: f64,
        lambda0: f64,
    },
    /// Lyapunov exponent over an energy grid.
    Lyapunov {
        lambda: f64,
        n: usize,
        trials: u64,
        energies: Vec<f64>,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Stationary projective measure at one energy.
    Furstenberg {
        energy: f64,
        lambda: f64,
        #[serde(default = "default_bins")]
        bins: usize,
        #[serde(default = "default_burn_in")]
        burn_in: u64,
        #[serde(default = "default_steps")]
        steps: u64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Integrated density of states and its numerical derivative.
    Ids {
        lambda: f64,
        n: usize,
        trials: u64,
        energies: Vec<f64>,
        #[serde(default)]
        bandwidth: Option<f64>,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// δ-sweep of the one-eigenvalue window probability.
    Wegner {
        e0: f64,
        n: usize,
        lambda: f64,
        deltas: Vec<f64>,
        trials: u64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Mean eigenvalue count in a window vs the DOS prediction.
    Trace {
        e0: f64,
        delta: f64,
        n: usize,
        lambda: f64,
        trials: u64,
        k_at_e0: f64,
        #[serde(default = "default_c")]
        c_cfg: f64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// δ-sweep of the two-eigenvalue window probability.
    Minami {
        e0: f64,
        n: usize,
        lambda: f64,
        deltas: Vec<f64>,
        trials: u64,
        #[serde(default = "default_c")]
        c_cfg: f64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// δ-sweep of the near-resonance event probability.
    Resonance {
        e0: f64,
        n: usize,
        lambda: f64,
        deltas: Vec<f64>,
        trials: u64,
        #[serde(default = "default_exponent")]
        exponent: f64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Rescaled local eigenvalue statistics and the Poisson battery.
    Poisson {
        lambda: f64,
        n: usize,
        e0: f64,
        l: f64,
        trials: u64,
        #[serde(default = "default_bootstrap_reps")]
        bootstrap_reps: u32,
        #[serde(default)]
        k_at_e0: Option<f64>,
        #[serde(default = "default_seed")]
        seed: u64,
    },
}

impl ExperimentConfig {
    /// The kebab-case experiment name (also the artifact file prefix,
    /// with `-` mapped to `_`).
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::ValidateCoupling { .. } => "validate-coupling",
            ExperimentConfig::Lyapunov { .. } => "lyapunov",
            ExperimentConfig::Furstenberg { .. } => "furstenberg",
            ExperimentConfig::Ids { .. } => "ids",
            ExperimentConfig::Wegner { .. } => "wegner",
            ExperimentConfig::Trace { .. } => "trace",
            ExperimentConfig::Minami { .. } => "minami",
            ExperimentConfig::Resonance { .. } => "resonance",
            ExperimentConfig::Poisson { .. } => "poisson",
        }
    }

    /// Replaces the base seed (the `--seed` CLI override). No-op for the
    /// deterministic `validate-coupling` experiment.
    pub fn override_seed(&mut self, new_seed: u64) {
        match self {
            ExperimentConfig::ValidateCoupling { .. } => {}
            ExperimentConfig::Lyapunov { seed, .. }
            | ExperimentConfig::Furstenberg { seed, .. }
            | ExperimentConfig::Ids { seed, .. }
            | ExperimentConfig::Wegner { seed, .. }
            | ExperimentConfig::Trace { seed, .. }
            | ExperimentConfig::Minami { seed, .. }
            | ExperimentConfig::Resonance { seed, .. }
            | ExperimentConfig::Poisson { seed, .. } => *seed = new_seed,
        }
    }
}

/// Parses a config file. Accepts either a bare [`ExperimentConfig`] object
/// or a previous run's summary JSON (its embedded `"config"` is used), so
/// every summary round-trips.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// See [`load_config`].
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let value: Value = serde_json::from_str(text)?;
    // A run summary nests the original config under "config"; no experiment
    // schema has a field of that name, so its presence (as an object that
    // carries its own "experiment" tag) identifies a summary.
    let config_value = match &value {
        Value::Object(map)
            if map
                .get("config")
                .and_then(Value::as_object)
                .is_some_and(|inner| inner.contains_key("experiment")) =>
        {
            map["config"].clone()
        }
        _ => value,
    };
    let config: ExperimentConfig = serde_json::from_value(config_value.clone())?;
    // Serde's internally-tagged enums ignore unknown keys, so check them
    // against the resolved config's own serialization (which carries every
    // legal key for the chosen experiment, defaults included).
    let resolved = serde_json::to_value(&config)?;
    if let (Some(input), Some(allowed)) = (config_value.as_object(), resolved.as_object()) {
        for key in input.keys() {
            if !allowed.contains_key(key) {
                return Err(Error::Config(format!(
                    "unknown key '{key}' for experiment '{}'",
                    config.name()
                )));
            }
        }
    }
    Ok(config)
}

/// Run-time options that are not part of the experiment's identity.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory for artifacts (created if missing).
    pub out_dir: PathBuf,
    /// Worker threads; `None` falls back to `ANDERSON_SPECTRA_THREADS`,
    /// then to one worker per logical CPU.
    pub threads: Option<usize>,
    /// Replaces the config's base seed when set.
    pub seed_override: Option<u64>,
}

/// Written/returned by [`run`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub experiment: &'static str,
    /// Paths of everything written, summary included.
    pub artifacts: Vec<PathBuf>,
    /// The summary JSON document.
    pub summary: Value,
}

struct ExperimentOutput {
    /// Scalar results for the summary JSON.
    results: Value,
    /// `(file name, body)` pairs of array-like data.
    csv_files: Vec<(String, String)>,
}

/// Executes one experiment end to end: resolves the thread pool, runs the
/// computation, and persists CSV artifacts plus the JSON summary into
/// `options.out_dir`. On a numerical error the partial context is flushed
/// to `<experiment>_error.json` before the error propagates.
pub fn run(mut config: ExperimentConfig, options: &RunOptions) -> Result<RunSummary> {
    if let Some(seed) = options.seed_override {
        config.override_seed(seed);
    }
    let threads = options.threads.or_else(threads_from_env);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("failed to build worker pool: {e}")))?;

    std::fs::create_dir_all(&options.out_dir)?;
    let prefix = config.name().replace('-', "_");

    let started = Instant::now();
    let outcome = pool.install(|| execute(&config));
    let wall_time_seconds = started.elapsed().as_secs_f64();

    let output = match outcome {
        Ok(output) => output,
        Err(err) => {
            let error_doc = json!({
                "experiment": config.name(),
                "version": env!("CARGO_PKG_VERSION"),
                "config": serde_json::to_value(&config)?,
                "error": err.to_string(),
                "exit_code": err.exit_code(),
            });
            let path = options.out_dir.join(format!("{prefix}_error.json"));
            // Best effort: the original error matters more than this write.
            let _ = std::fs::write(&path, pretty(&error_doc));
            return Err(err);
        }
    };

    let mut artifacts = Vec::new();
    let mut artifact_names = Vec::new();
    for (name, body) in &output.csv_files {
        let path = options.out_dir.join(name);
        std::fs::write(&path, body)?;
        artifact_names.push(name.clone());
        artifacts.push(path);
    }
    let summary_name = format!("{prefix}_summary.json");
    artifact_names.push(summary_name.clone());

    let summary = json!({
        "experiment": config.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(&config)?,
        "wall_time_seconds": wall_time_seconds,
        "results": output.results,
        "artifacts": artifact_names,
    });
    let summary_path = options.out_dir.join(summary_name);
    std::fs::write(&summary_path, pretty(&summary))?;
    artifacts.push(summary_path);

    Ok(RunSummary {
        experiment: config.name(),
        artifacts,
        summary,
    })
}

fn threads_from_env() -> Option<usize> {
    let raw = std::env::var(THREADS_ENV).ok()?;
    raw.trim().parse::<usize>().ok().filter(|t| *t > 0)
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON value");
    text.push('\n');
    text
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn scaling_csv(scan: &ScalingExperiment) -> String {
    let mut body = String::from(
        "delta,probability,stderr,ci95_lo,ci95_hi,successes,trials,in_band\n",
    );
    for cell in &scan.cells {
        let e = &cell.estimate;
        let _ = writeln!(
            body,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(cell.delta),
            fmt_f64(e.probability),
            fmt_f64(e.stderr),
            fmt_f64(e.ci95.0),
            fmt_f64(e.ci95.1),
            e.successes,
            e.trials,
            cell.in_band
        );
    }
    body
}

fn scaling_results(scan: &ScalingExperiment) -> Value {
    json!({
        "slope": scan.fit.as_ref().map(|f| f.slope),
        "slope_stderr": scan.fit.as_ref().map(|f| f.slope_stderr),
        "intercept": scan.fit.as_ref().map(|f| f.intercept),
        "residual_rms": scan.fit.as_ref().map(|f| f.residual_rms),
        "dropped_zero_cells": scan.dropped_zero_cells,
        "cells": scan.cells,
    })
}

fn execute(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    match config {
        ExperimentConfig::ValidateCoupling {
            lambda,
            poly,
            coeff_bound_exponent,
            lambda0,
        } => {
            let spec = CouplingSpec {
                lambda: *lambda,
                poly_coeffs: poly.clone(),
                coeff_bound_exponent: *coeff_bound_exponent,
                lambda0: *lambda0,
            };
            let report = validate_coupling(&spec)?;
            let mut csv = String::from("root_re,root_im,modulus\n");
            for (re, im) in &report.roots {
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    fmt_f64(*re),
                    fmt_f64(*im),
                    fmt_f64(re.hypot(*im))
                );
            }
            Ok(ExperimentOutput {
                results: serde_json::to_value(&report)?,
                csv_files: vec![("validate_coupling_roots.csv".into(), csv)],
            })
        }
        ExperimentConfig::Lyapunov {
            lambda,
            n,
            trials,
            energies,
            seed,
        } => {
            let scan = lyapunov_scan(energies, *lambda, *n, *trials, *seed)?;
            let mut csv = String::from("energy,lyapunov,stderr\n");
            for est in &scan {
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    fmt_f64(est.energy),
                    fmt_f64(est.value),
                    fmt_f64(est.stderr)
                );
            }
            Ok(ExperimentOutput {
                results: serde_json::to_value(&scan)?,
                csv_files: vec![("lyapunov_scan.csv".into(), csv)],
            })
        }
        ExperimentConfig::Furstenberg {
            energy,
            lambda,
            bins,
            burn_in,
            steps,
            seed,
        } => {
            let params = FurstenbergParams {
                bins: *bins,
                burn_in: *burn_in,
                steps: *steps,
                seed: *seed,
            };
            let est = furstenberg_estimate(*energy, *lambda, &params)?;
            let mut csv = String::from("bin_center,mass,stderr\n");
            for i in 0..est.bins() {
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    fmt_f64(est.bin_center(i)),
                    fmt_f64(est.mass[i]),
                    fmt_f64(est.mass_stderr(i))
                );
            }
            let results = json!({
                "stationarity_residual": est.stationarity_residual,
                "steps": est.steps,
                "bins": est.bins(),
            });
            Ok(ExperimentOutput {
                results,
                csv_files: vec![("furstenberg_measure.csv".into(), csv)],
            })
        }
        ExperimentConfig::Ids {
            lambda,
            n,
            trials,
            energies,
            bandwidth,
            seed,
        } => {
            let params = IdsParams {
                lambda: *lambda,
                n: *n,
                trials: *trials,
                energies: energies.clone(),
                bandwidth: *bandwidth,
                seed: *seed,
            };
            let curve = ids_dos(&params)?;
            let mut csv = String::from("energy,ids,stderr,dos\n");
            for (i, e) in curve.energies.iter().enumerate() {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    fmt_f64(*e),
                    fmt_f64(curve.ids[i]),
                    fmt_f64(curve.stderr[i]),
                    fmt_opt(curve.dos.as_ref().map(|d| d[i]))
                );
            }
            let results = json!({
                "bandwidth": curve.bandwidth,
                "bandwidth_ok": curve.bandwidth_ok,
                "dos_integral": curve.dos_integral(),
                "curve": curve,
            });
            Ok(ExperimentOutput {
                results,
                csv_files: vec![("ids_curve.csv".into(), csv)],
            })
        }
        ExperimentConfig::Wegner {
            e0,
            n,
            lambda,
            deltas,
            trials,
            seed,
        } => {
            let scan = wegner_scan(*e0, *n, *lambda, deltas, *trials, *seed)?;
            Ok(ExperimentOutput {
                results: scaling_results(&scan),
                csv_files: vec![("wegner_cells.csv".into(), scaling_csv(&scan))],
            })
        }
        ExperimentConfig::Trace {
            e0,
            delta,
            n,
            lambda,
            trials,
            k_at_e0,
            c_cfg,
            seed,
        } => {
            let result =
                expected_trace(*e0, *delta, *n, *lambda, *trials, *k_at_e0, *c_cfg, *seed)?;
            let csv = format!(
                "delta,mean,stderr,prediction,discrepancy\n{},{},{},{},{}\n",
                fmt_f64(result.delta),
                fmt_f64(result.mean),
                fmt_f64(result.stderr),
                fmt_f64(result.prediction),
                fmt_opt(result.discrepancy)
            );
            Ok(ExperimentOutput {
                results: serde_json::to_value(&result)?,
                csv_files: vec![("trace_window.csv".into(), csv)],
            })
        }
        ExperimentConfig::Minami {
            e0,
            n,
            lambda,
            deltas,
            trials,
            c_cfg,
            seed,
        } => {
            let scan = minami_scan(*e0, *n, *lambda, deltas, *trials, *c_cfg, *seed)?;
            Ok(ExperimentOutput {
                results: scaling_results(&scan),
                csv_files: vec![("minami_cells.csv".into(), scaling_csv(&scan))],
            })
        }
        ExperimentConfig::Resonance {
            e0,
            n,
            lambda,
            deltas,
            trials,
            exponent,
            seed,
        } => {
            let scan = near_resonance_scan(*e0, *n, *lambda, deltas, *exponent, *trials, *seed)?;
            Ok(ExperimentOutput {
                results: scaling_results(&scan),
                csv_files: vec![("resonance_cells.csv".into(), scaling_csv(&scan))],
            })
        }
        ExperimentConfig::Poisson {
            lambda,
            n,
            e0,
            l,
            trials,
            bootstrap_reps,
            k_at_e0,
            seed,
        } => {
            let samples = rescaled_samples(*lambda, *n, *e0, *l, *trials, *seed)?;
            let config = PoissonTestConfig {
                bootstrap_reps: *bootstrap_reps,
                seed: *seed,
                k_at_e0: *k_at_e0,
            };
            let battery = poisson_tests(&samples, &config)?;
            let mut csv = String::from("trial,count\n");
            for (t, s) in samples.iter().enumerate() {
                let _ = writeln!(csv, "{},{}", t, s.points.len());
            }
            Ok(ExperimentOutput {
                results: serde_json::to_value(&battery)?,
                csv_files: vec![("poisson_counts.csv".into(), csv)],
            })
        }
    }
}

//! Thin CLI over [`anderson_spectra::harness`]:
//!
//! ```text
//! anderson-spectra <experiment> --config file.json [--out dir] [--threads k] [--seed s]
//! ```
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use anderson_spectra::harness::{self, RunOptions, RunSummary};
use anderson_spectra::Error;

#[derive(Parser)]
#[command(
    name = "anderson-spectra",
    version,
    about = "Spectral statistics of the 1D Anderson-Bernoulli Hamiltonian",
    after_help = "The config is a JSON object with an \"experiment\" tag; a previous run's\n\
                  summary JSON is also accepted and reruns identically. --seed and --threads\n\
                  override the config; ANDERSON_SPECTRA_THREADS is the --threads fallback."
)]
struct Cli {
    #[command(subcommand)]
    experiment: Experiment,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment descriptor (or a previous run's summary JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for CSV/JSON artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (fallback: ANDERSON_SPECTRA_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Override the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Experiment {
    /// Check the algebraic coupling-constant conditions.
    ValidateCoupling(CommonArgs),
    /// Lyapunov exponent over an energy grid.
    Lyapunov(CommonArgs),
    /// Stationary projective (Furstenberg) measure at one energy.
    Furstenberg(CommonArgs),
    /// Integrated density of states and numerical DOS.
    Ids(CommonArgs),
    /// Wegner-type window probability sweep.
    Wegner(CommonArgs),
    /// Expected eigenvalue count in a window vs the DOS prediction.
    Trace(CommonArgs),
    /// Minami-type two-eigenvalue window probability sweep.
    Minami(CommonArgs),
    /// Near-resonance event probability sweep.
    Resonance(CommonArgs),
    /// Rescaled local eigenvalue statistics and the Poisson battery.
    Poisson(CommonArgs),
}

impl Experiment {
    fn unpack(&self) -> (&'static str, &CommonArgs) {
        match self {
            Experiment::ValidateCoupling(a) => ("validate-coupling", a),
            Experiment::Lyapunov(a) => ("lyapunov", a),
            Experiment::Furstenberg(a) => ("furstenberg", a),
            Experiment::Ids(a) => ("ids", a),
            Experiment::Wegner(a) => ("wegner", a),
            Experiment::Trace(a) => ("trace", a),
            Experiment::Minami(a) => ("minami", a),
            Experiment::Resonance(a) => ("resonance", a),
            Experiment::Poisson(a) => ("poisson", a),
        }
    }
}

fn run(name: &'static str, args: &CommonArgs) -> anderson_spectra::Result<RunSummary> {
    let config = harness::load_config(&args.config)?;
    if config.name() != name {
        return Err(Error::Config(format!(
            "config describes experiment '{}', but subcommand '{}' was given",
            config.name(),
            name
        )));
    }
    harness::run(
        config,
        &RunOptions {
            out_dir: args.out.clone(),
            threads: args.threads,
            seed_override: args.seed,
        },
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = cli.experiment.unpack();
    match run(name, args) {
        Ok(summary) => {
            for path in &summary.artifacts {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

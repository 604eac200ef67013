//! Spectral statistics for the one-dimensional Anderson-Bernoulli Hamiltonian.
//!
//! The model is the random Schrödinger operator
//!
//! ```text
//! H = Δ + λ V        (Hψ)(j) = ψ(j+1) + ψ(j-1) + λ v_j ψ(j)
//! ```
//!
//! on the lattice `ℤ`, where the potential values `v_j` are IID symmetric
//! Bernoulli (`±1` with probability 1/2) and `λ > 0` is the disorder
//! coupling. Finite volumes use the Dirichlet truncation `H_N` on
//! `[1, N]`, an `N×N` symmetric tridiagonal matrix with unit off-diagonal
//! and diagonal `λ v_j`.
//!
//! The crate provides the numerical toolbox needed to study localization
//! and local eigenvalue statistics of this operator:
//!
//! * [`model`] — potential sampling, Hamiltonian assembly, and validation
//!   of algebraic coupling constants of the form used in the underlying
//!   spectral theory (small algebraic `λ` with a conjugate of modulus ≥ 1).
//! * [`transfer`] — `SL(2, ℝ)` transfer-matrix products with logarithmic
//!   renormalization, the projective-circle action, Furstenberg-measure
//!   estimation, Lyapunov exponents, and Monte Carlo estimators for
//!   large-deviation and angle-concentration bounds.
//! * [`spectrum`] — Sturm eigenvalue counting, bisection + inverse-iteration
//!   eigensolves restricted to an energy window, the integrated density of
//!   states and its numerical derivative, and localization-center fits.
//! * [`stats`] — Wegner- and Minami-type window statistics, near-resonance
//!   events, rescaled eigenvalue point processes, and a Poisson test
//!   battery (counts, gaps, split-interval correlation).
//! * [`harness`] — JSON-configured experiment runner behind the
//!   `anderson-spectra` binary, with deterministic parallel seeding.
//!
//! # Reproducibility
//!
//! Every Monte Carlo routine takes an explicit `u64` seed, expands it into
//! per-trial ChaCha8 streams (see [`rng::seed_for_trial`]), and reduces
//! results in trial order with compensated summation. Outputs are therefore
//! byte-identical across thread counts; see the `harness` docs for the
//! `--threads` / `ANDERSON_SPECTRA_THREADS` knobs.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --release -p anderson-spectra --example validate_coupling
//! cargo run --release -p anderson-spectra --example lyapunov_scan
//! cargo run --release -p anderson-spectra --example furstenberg_measure
//! cargo run --release -p anderson-spectra --example ids_dos
//! cargo run --release -p anderson-spectra --example wegner_scaling
//! cargo run --release -p anderson-spectra --example expected_trace
//! cargo run --release -p anderson-spectra --example minami_scaling
//! cargo run --release -p anderson-spectra --example near_resonance
//! cargo run --release -p anderson-spectra --example poisson_spacings
//! ```

pub mod error;
pub mod harness;
pub mod mc;
pub mod model;
pub mod rng;
pub mod spectrum;
pub mod stats;
pub mod transfer;

pub use error::Error;
pub use model::{
    build_hamiltonian, sample_potential, validate_coupling, CouplingReport, CouplingSpec,
    PotentialRealization, TridiagonalHamiltonian,
};
pub use spectrum::{
    eigen_window, ids_dos, localization_centers, restrict, sturm_count, IdsCurve,
    LocalizationFit, SpectralWindowResult,
};
pub use stats::{
    expected_trace, localization_partition, minami_probability, minami_scan,
    near_resonance_event, near_resonance_scan, poisson_tests, rescaled_sample, rescaled_samples,
    wegner_probability, wegner_scan, NearResonanceReport, PointProcessSample, PoissonBattery,
    ScalingCell, ScalingExperiment, TraceResult,
};
pub use transfer::{
    furstenberg_estimate, lyapunov_exponent, projective_action, tau_max_interval, transfer_product,
    transfer_step, FurstenbergEstimate, Mat2, ProjectiveAngle, TransferProduct,
};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

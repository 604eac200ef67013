//! Crate-wide error type.
//!
//! Errors split into two families, mirrored by the CLI exit codes:
//! configuration errors (bad sizes, windows, inconsistent coupling specs,
//! preconditions — exit code 2) and numerical failures (non-finite values,
//! failed iterations, insufficient samples — exit code 3).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A size, length or count parameter was zero / out of range.
    #[error("invalid size: {0}")]
    InvalidSize(String),

    /// An energy window or sub-interval parameter was malformed.
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    /// An index interval was not contained in the host interval.
    #[error("interval [{lo}, {hi}] not contained in [{host_lo}, {host_hi}]")]
    IntervalOutOfBounds {
        lo: usize,
        hi: usize,
        host_lo: usize,
        host_hi: usize,
    },

    /// `λ = 0` makes the transfer cocycle elliptic (conjugate to a
    /// rotation); there is no contraction and no unique stationary measure.
    #[error("degenerate (elliptic) coupling: lambda = 0 has no unique stationary measure")]
    DegenerateCoupling,

    /// Polynomial with no usable roots (all coefficients zero, or zero
    /// leading coefficient).
    #[error("degenerate polynomial: {0}")]
    DegeneratePolynomial(String),

    /// The supplied coupling is not actually a root of the supplied
    /// polynomial.
    #[error("lambda is not a root of the polynomial (|P(lambda)| = {residual:.3e} >= {tolerance:.1e})")]
    LambdaNotRoot { residual: f64, tolerance: f64 },

    /// A quantitative hypothesis of the estimate being evaluated does not
    /// hold for the requested parameters; running anyway would produce a
    /// number the theory says nothing about.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Inverse iteration failed to converge for one eigenvalue even after
    /// shift perturbation. Loud by design: a silently bad eigenvector would
    /// poison every downstream localization statistic.
    #[error("inverse iteration failed to converge for eigenvalue #{index} (shift {shift:.6e})")]
    InverseIteration { index: usize, shift: f64 },

    /// A non-finite number appeared where a finite one is required.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Too few Monte Carlo samples for the requested statistic.
    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },

    /// Experiment configuration errors (unknown experiment, missing key,
    /// wrong types) — anything wrong with the JSON contract.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code for this error: 2 for configuration errors, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidSize(_)
            | Error::InvalidWindow(_)
            | Error::IntervalOutOfBounds { .. }
            | Error::DegenerateCoupling
            | Error::DegeneratePolynomial(_)
            | Error::LambdaNotRoot { .. }
            | Error::Precondition(_)
            | Error::Config(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::InverseIteration { .. }
            | Error::NonFinite(_)
            | Error::InsufficientSamples { .. } => 3,
        }
    }
}

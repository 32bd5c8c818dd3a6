use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truncated space: dim = {dim}, need at least 2 Fock levels")]
    InvalidSpace { dim: usize },

    #[error("truncation too small: dim = {dim}, need at least {required}")]
    TruncationTooSmall { dim: usize, required: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("no exceptional point: {0}")]
    NoExceptionalPoint(String),

    #[error("numerical failure: {0}")]
    NumericFailure(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error(
        "stiffness: step size {step:e} s underflowed at t = {time:e} s; \
         loosen the tolerances or shorten the κ·t span"
    )]
    Stiffness { time: f64, step: f64 },

    #[error("integration failure at t = {time:e} s: {reason}")]
    IntegrationFailure { time: f64, reason: String },

    #[error("steady state not converged by t = {time:e} s (residual {residual:e} rad/s)")]
    Convergence { time: f64, residual: f64 },

    #[error("outside the validated regime: {0}")]
    Regime(String),

    #[error("cat-subspace projection unreliable: leakage {0:.4}")]
    ProjectionUnreliable(f64),

    #[error("phase difference undefined: off-diagonal magnitude {0:e}")]
    UndefinedPhase(f64),

    #[error("invalid sweep: {}", .0.join("; "))]
    InvalidSweep(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpace { .. } => "invalid-space",
            Error::TruncationTooSmall { .. } => "truncation-too-small",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::InvalidParams(_) => "invalid-params",
            Error::NoExceptionalPoint(_) => "no-ep",
            Error::NumericFailure(_) => "numeric-failure",
            Error::InvalidState(_) => "invalid-state",
            Error::Stiffness { .. } => "stiffness",
            Error::IntegrationFailure { .. } => "integration-failure",
            Error::Convergence { .. } => "convergence",
            Error::Regime(_) => "regime",
            Error::ProjectionUnreliable(_) => "projection-unreliable",
            Error::UndefinedPhase(_) => "undefined-phase",
            Error::InvalidSweep(_) => "invalid-sweep",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

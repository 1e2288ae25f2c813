use thiserror::Error;

/// Errors surfaced by the pricing library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid contract: {0}")]
    InvalidContract(String),

    /// Exponential jump amplitudes with rate alpha <= 1 have no finite
    /// exponential moment, so no risk-neutral drift exists.
    #[error("exponential moment diverges: jump rate alpha = {alpha} must exceed 1")]
    DivergentExponentialMoment { alpha: f64 },

    /// The requested operation only exists for a subset of jump laws.
    #[error("unsupported jump law: {0}")]
    UnsupportedJumpLaw(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("series truncation budget exceeded: {0}")]
    TruncationBudgetExceeded(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParam(_)
            | Error::InvalidContract(_)
            | Error::DivergentExponentialMoment { .. }
            | Error::UnsupportedJumpLaw(_)
            | Error::Config(_) => 2,
            Error::QuadratureFailure(_) | Error::TruncationBudgetExceeded(_) => 3,
            Error::InternalInvariant(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

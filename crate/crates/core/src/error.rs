use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("r = {r} lies outside the box [0, {box_radius}]")]
    Domain { r: f64, box_radius: f64 },

    #[error("kernel has a pole of order {0} at r = 0; at most 1/r is supported")]
    SingularKernel(u32),

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("eigensolver failed for channel {channel}: {reason}")]
    Eigensolver { channel: String, reason: String },

    #[error("no bound state found in channel {0}; enlarge the box or the basis")]
    NoBoundState(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("coupling operator is not Hermitian: residual {residual:e} (scale {scale:e})")]
    NotHermitian { residual: f64, scale: f64 },

    #[error("propagation aborted at t = {t}: {reason}")]
    Propagation { t: f64, reason: String },

    #[error("query {query} is outside the rate table range [{lo}, {hi}]")]
    OutOfRange { query: f64, lo: f64, hi: f64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

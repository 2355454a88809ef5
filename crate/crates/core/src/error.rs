use std::io;

/// Errors produced by graph construction, simulation and the numerical kernels.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("layer size mismatch: awareness layer has {awareness} nodes, contact layer has {contact}")]
    SizeMismatch { awareness: usize, contact: usize },

    /// The awareness fixed point did not settle. Carries the last iterate so
    /// callers can inspect or resume from it.
    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:e})")]
    FixedPointNoConvergence {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    #[error("power iteration did not converge after {iterations} iterations (last estimate {estimate})")]
    EigenNoConvergence { iterations: usize, estimate: f64 },

    #[error("malformed edge list at line {line}: {message}")]
    EdgeList { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

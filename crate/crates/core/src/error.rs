use thiserror::Error;

/// Errors produced by the capacity library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The numerical routine ran out of budget before meeting its tolerance.
    #[error("accuracy failure: best estimate {value} with error {error} ({context})")]
    Accuracy {
        value: f64,
        error: f64,
        context: String,
    },

    /// The (activation, width, estimator) combination has no implementation.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A 1D search could not bracket its target.
    #[error("bracket failure: {message}; scan trace: {trace:?}")]
    Bracket {
        message: String,
        trace: Vec<(f64, f64)>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Fewer observations than the requested order depth.
    #[error("insufficient sample: need {needed} values, have {available}")]
    InsufficientSample { needed: usize, available: usize },

    #[error("empty sample")]
    EmptySample,

    /// Moment or correlation estimator was given a sample without spread.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// The bivariate extreme value limit of the configured claim model is not a product law.
    #[error("unsupported dependence: {0}")]
    UnsupportedDependence(String),

    #[error("wrong max-domain of attraction: {0}")]
    WrongMda(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("invalid `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

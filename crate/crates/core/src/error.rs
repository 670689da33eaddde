use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter or argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical routine failed to reach its tolerance.
    #[error("numerical error: {msg} (achieved {achieved:e})")]
    Numerical { msg: String, achieved: f64 },
    /// Bad user input (series too short, malformed values).
    #[error("input error: {0}")]
    Input(String),
    /// Inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Too few usable samples for the requested statistic.
    #[error("sample size error: {0}")]
    SampleSize(String),
    /// Parameters too close to the boundary for a centred difference.
    #[error("boundary error: {0}")]
    Boundary(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, achieved: f64) -> Self {
        Error::Numerical {
            msg: msg.into(),
            achieved,
        }
    }

    /// True for failures of a numerical method rather than of the caller.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical { .. } | Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

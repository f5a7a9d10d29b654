use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A distribution parameter is out of range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Sample data is empty or contains inadmissible values.
    #[error("data error: {0}")]
    Data(String),

    /// An argument lies outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A ladder level was requested that the chain does not hold.
    #[error("level {requested} is not available (chain holds levels up to {max})")]
    Level { requested: usize, max: usize },

    /// Quadrature or root search failed to meet its tolerance.
    #[error("numeric failure at level {level}: {detail}")]
    Numeric { level: usize, detail: String },

    /// Evaluation point lies in the deep tail where the survival is below the cut.
    #[error("tail error: survival of level {level} at x = {x} is below the tail cut")]
    Tail { level: usize, x: f64 },

    /// A sampled function does not carry enough points for a shape test.
    #[error("grid error: {0}")]
    Grid(String),

    /// A distribution spec or input file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn numeric(level: usize, detail: impl Into<String>) -> Self {
        Error::Numeric {
            level,
            detail: detail.into(),
        }
    }

    /// True for errors caused by malformed user input rather than numeric trouble.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parameter(_) | Error::Data(_) | Error::Parse(_) | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

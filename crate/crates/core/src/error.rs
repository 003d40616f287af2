use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the model is defined.
    #[error("{quantity} = {value} is outside the valid domain ({domain})")]
    OutOfDomain {
        quantity: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pattern resolution mismatch: {left} bins vs {right} bins")]
    ResolutionMismatch { left: usize, right: usize },

    #[error("pattern has no positive gain")]
    DegeneratePattern,

    /// Malformed input file; `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn out_of_domain(quantity: &'static str, value: f64, domain: &'static str) -> Self {
        Error::OutOfDomain {
            quantity,
            value,
            domain,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

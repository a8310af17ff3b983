use thiserror::Error;

/// Errors raised by the numerical library and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: wrong shapes, non-finite entries, inconsistent dimensions.
    #[error("invalid input: {0}")]
    Input(String),

    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exact separability (or an exact gauge) was requested in dimensions where
    /// no exact membership test is available.
    #[error("unsupported dimensions {dims:?}: {reason}")]
    UnsupportedDimension { dims: Vec<usize>, reason: String },

    /// Experiment configuration rejected during validation.
    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn unsupported(dims: &[usize], reason: impl Into<String>) -> Self {
        Error::UnsupportedDimension {
            dims: dims.to_vec(),
            reason: reason.into(),
        }
    }
}

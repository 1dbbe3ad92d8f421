use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    Dimension {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("eigensolver did not converge after {iterations} iterations ({} of {} eigenvalues found)", .partial.len(), .size)]
    Convergence {
        iterations: usize,
        size: usize,
        partial: Vec<Complex64>,
    },

    #[error("degenerate iteration: {0}")]
    Degenerate(String),

    #[error("no finite eigenvalues survived the reduced solve: {0}")]
    EmptySpectrum(String),

    #[error("invalid value: {0}")]
    InvalidInput(String),

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("matrix market parse error (line {line}): {msg}")]
    MatrixMarket { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(op: &'static str, expected: impl ToString, got: impl ToString) -> Self {
        Error::Dimension {
            op,
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

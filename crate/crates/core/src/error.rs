use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("FCIDUMP header is missing required field {0}")]
    MissingHeaderField(&'static str),
    #[error("index {index} out of range (limit {limit}){}", context_suffix(.context))]
    IndexOutOfRange {
        index: usize,
        limit: usize,
        context: String,
    },
    #[error("malformed line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("conflicting duplicate integral {indices:?}: {first} vs {second}")]
    ConflictingDuplicate {
        indices: Vec<usize>,
        first: f64,
        second: f64,
    },
    #[error("invalid config value for `{key}`: {reason}")]
    ValidationFailed { key: String, reason: String },
    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failure: {0}")]
    Serialization(String),
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },
    #[error("operator is not Hermitian (anti-Hermitian part {0:e})")]
    NonHermitianInput(f64),
    #[error("no eigenstate in the requested sector ({0})")]
    EmptySector(String),
    #[error("only closed-shell references are supported, got {0} electrons")]
    OddElectronCount(usize),
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("no expectation value supplied for Pauli string {0}")]
    MissingExpectation(String),
    #[error("metric is singular: every direction fell below the threshold {0:e}")]
    SingularMetric(f64),
    #[error("POVM frame is not informationally complete")]
    NotInformationallyComplete,
    #[error("outcome record is empty")]
    EmptyRecord,
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

fn context_suffix(ctx: &str) -> String {
    if ctx.is_empty() {
        String::new()
    } else {
        format!(" in {ctx}")
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::ValidationFailed {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

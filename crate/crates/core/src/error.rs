use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported wavelet {family} with {vanishing_moments} vanishing moments (supported: {supported})")]
    UnsupportedFilter {
        family: String,
        vanishing_moments: usize,
        supported: String,
    },

    #[error("unknown filter spec `{spec}` (supported: {supported})")]
    UnknownFilterSpec { spec: String, supported: String },

    #[error("filter {name} failed validation: {reason}")]
    InvalidFilter { name: String, reason: String },

    #[error("length {0} is not a power of two; pad (--pad reflect|zero) or truncate (--truncate) explicitly")]
    NonDyadicLength(usize),

    #[error("requested {levels} levels but a series of length {len} supports at most {max}")]
    TooManyLevels { levels: usize, len: usize, max: usize },

    #[error("invalid scale index {0}")]
    InvalidScale(usize),

    #[error("inner product matrix for J={levels} ({filter}) is numerically singular (condition number {condition:e})")]
    SingularInnerProduct {
        levels: usize,
        filter: String,
        condition: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("negative value {value} at index {index}")]
    NegativeValue { index: usize, value: f64 },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("Haar-Fisz inverse is inconsistent at level {level}, position {position}: implied ratio {ratio}")]
    InconsistentHaarFisz {
        level: usize,
        position: usize,
        ratio: f64,
    },

    #[error("marginal log-likelihood is not finite at coefficient {index}")]
    NonFiniteLikelihood { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("too many rejected posterior draws: {rejected} of {attempted}")]
    TooManyRejections { rejected: usize, attempted: usize },

    #[error("replicate {index} failed: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

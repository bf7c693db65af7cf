//! Error type shared across the crate.

use thiserror::Error;

use crate::hashing::Phase;

pub type Result<T, E = SfftError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SfftError {
    #[error("signal length {0} is not a power of two")]
    InvalidLength(usize),

    #[error("filter sharpness F={0} must be an even integer >= 2")]
    InvalidSharpness(usize),

    #[error("bucket count B={b} invalid for length n={n} (need a power of two with 2 <= B <= n/2)")]
    InvalidBucketing { b: usize, n: usize },

    #[error("sigma={0} is even; spectrum permutations need an odd multiplier")]
    InvalidPermutation(usize),

    #[error("expected a {expected}-domain signal")]
    DomainMismatch { expected: &'static str },

    #[error("constructed filter (n={n}, B={b}, F={f}) failed its flatness/decay verification at offset {j}")]
    FilterVerification { n: usize, b: usize, f: usize, j: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("index {index} out of range for length {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("quantile fraction {0} must lie in (0, 1]")]
    InvalidQuantile(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("isolating partition construction did not settle within {rounds} rounds")]
    PartitionFailure { rounds: usize },

    #[error("sample budget exceeded during {phase:?}: budget {budget}, would reach {requested}")]
    BudgetExceeded {
        phase: Phase,
        budget: u64,
        requested: u64,
    },

    #[error("i/o failure on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed signal file {path}: {reason}")]
    MalformedFile { path: String, reason: String },
}

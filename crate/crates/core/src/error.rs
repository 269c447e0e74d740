use thiserror::Error;

use crate::partition::FeasibilityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid popularity: {0}")]
    InvalidPopularity(String),

    #[error("index {index} out of range 1..={max}")]
    Index { index: usize, max: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A brute-force or storage path would exceed its configured cap.
    #[error("capacity exceeded: {what} requires {required}, cap is {cap}")]
    Capacity {
        what: &'static str,
        required: u128,
        cap: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible partition: {0}")]
    Infeasible(FeasibilityReport),

    #[error("memory shares are undefined for a zero cache size")]
    UndefinedShares,

    #[error("quantization failed at F = {f}{}", min_f.map(|m| format!(", minimum viable F is {m}")).unwrap_or_default())]
    Quantization { f: u64, min_f: Option<u64> },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}

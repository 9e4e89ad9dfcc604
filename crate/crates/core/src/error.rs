use thiserror::Error;

use crate::model::Charge;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Schmidt coefficient {value} at sector {sector}, index {index}: {reason}")]
    Validation {
        sector: Charge,
        index: usize,
        value: f64,
        reason: &'static str,
    },

    #[error("Schmidt coefficients sum to {sum}, which deviates from 1 by more than {tolerance:e}")]
    Normalization { sum: f64, tolerance: f64 },

    #[error("operator is not a state: {0}")]
    NotAState(String),

    #[error("support violation: weight {weight:e} of the first argument lies outside the support of the second")]
    SupportViolation { weight: f64 },

    #[error("block mismatch: {0}")]
    BlockMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("copy count {n} exceeds the limit {max}")]
    CopyLimitExceeded { n: u32, max: u32 },

    #[error("multiplicity overflow while building {0} copies")]
    MultiplicityOverflow(u32),

    #[error("invalid copy count {0}; at least one copy is required")]
    InvalidCopyCount(u32),

    #[error("rotation target sector {sector} has rank {rank}; need at least {required}")]
    TargetRank {
        sector: Charge,
        rank: u64,
        required: u64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("decomposition identity violated: AREE - ACE - CE = {residual:e}")]
    DecompositionViolation { residual: f64 },

    #[error("dense representation too large: dimension {dim} exceeds {max}")]
    TooLarge { dim: u64, max: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors caused by bad user-supplied state data.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. } | Error::Normalization { .. } | Error::Parse(_)
        )
    }
}

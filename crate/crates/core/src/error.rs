use thiserror::Error;

use crate::triplet::ConditionReport;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("element index {index} out of range for group of order {order}")]
    InvalidElement { index: usize, order: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("structural error: {0}")]
    Structural(String),

    /// A triplet-structure condition failed; the report carries witnesses.
    #[error("condition check failed: {}", .0.summary())]
    Conditions(Box<ConditionReport>),

    #[error("numerical error in {what}: residual {residual:e} above tolerance")]
    Numerical { what: String, residual: f64 },

    #[error("sampling failed after {attempts} attempts: {reason}")]
    Sampling { attempts: u32, reason: String },

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

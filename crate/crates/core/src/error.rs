use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("validation failed: {check} (residual {residual:e})")]
    Validation { check: String, residual: f64 },
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("resource budget exceeded: {what}")]
    Resource { what: String, partial: Vec<u64> },
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("pole proximity: factor modulus {0:e}")]
    PoleProximity(f64),
    #[error("degenerate multiplier: |1 - mu^m| = {0:e}")]
    DegenerateMultiplier(f64),
    #[error("completeness error: requested {requested} beyond complete region {limit}")]
    Completeness { requested: f64, limit: f64 },
    #[error("bracketing error: {0}")]
    Bracketing(String),
    #[error("staleness error: {0}")]
    Stale(String),
    #[error("corruption error: {0}")]
    Corrupt(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

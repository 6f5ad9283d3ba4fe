use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GkwError {
    #[error("map parameter p must be a positive integer, got {0}")]
    InvalidParam(u32),

    #[error("{what}: argument {value} outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("{what}: non-finite value encountered")]
    NonFinite { what: &'static str },

    #[error("Hurwitz zeta order s = {0} is not supported (only 2 and 3)")]
    UnsupportedOrder(u32),

    #[error("invalid degree {degree}: {reason}")]
    InvalidDegree { degree: usize, reason: &'static str },

    #[error("truncation cutoff K = {cutoff} must be at least p + 1 = {min}")]
    InvalidCutoff { cutoff: usize, min: usize },

    #[error("degree mismatch: operator expects degree {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("root bracket [{lo}, {hi}] does not contain a sign change")]
    Bracket { lo: f64, hi: f64 },

    #[error("{what} did not converge within {iterations} iterations")]
    NotConverged {
        what: &'static str,
        iterations: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, GkwError>;

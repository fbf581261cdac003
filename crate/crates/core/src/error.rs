use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("size {requested} exceeds the configured cap {cap}")]
    Size { requested: usize, cap: usize },
    #[error("matrix is not Hermitian (defect {defect:.3e} > {tol:.1e})")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not a valid quantum state: {0}")]
    InvalidState(String),
    #[error("not a valid POVM: {0}")]
    InvalidPovm(String),
    #[error("channel is not CPTP: {0}")]
    NotCptp(String),
    #[error("probabilities inconsistent: total {total}")]
    Inconsistent { total: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("eigensolver failed to converge")]
    NoConvergence,
}

pub type Result<T> = core::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the engine.
///
/// Variants fall into three families that the command-line front end maps to
/// distinct exit codes: bad input, a computation that would exceed its
/// enumeration cap, and a detected mathematical inconsistency.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid extension degree {0}")]
    InvalidDegree(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{q} is not a power of the characteristic {p}")]
    NotAPowerOfP { q: u64, p: u64 },
    #[error("incompatible degrees: {0}")]
    IncompatibleDegrees(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("no root of the defining polynomial found in the target field")]
    NoRoot,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("zero coordinate in a torus point")]
    ZeroCoordinate,
    #[error("enumeration cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },
    #[error("polytope is not full-dimensional (dim {dim} in ambient {n})")]
    Degenerate { dim: usize, n: usize },
    #[error("origin is not an interior point")]
    OriginNotInterior,
    #[error("face does not belong to the Newton polytope")]
    ForeignFace,
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("non-integral reconstruction: {0}")]
    NonIntegral(String),
    #[error("not Δ-regular: {0}")]
    NotRegular(String),
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Process exit code used by the CLI for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 3,
            Error::NonIntegral(_) | Error::Inconsistent(_) => 4,
            _ => 2,
        }
    }

    pub(crate) fn cap(what: impl Into<String>, needed: u128, cap: u128) -> Self {
        Error::CapExceeded { what: what.into(), needed, cap }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

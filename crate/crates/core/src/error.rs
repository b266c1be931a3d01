use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("precision {0} outside the supported range 1..={max}", max = crate::padic::MAX_PRECISION)]
    InvalidPrecision(u32),
    #[error("scalars belong to different primes ({0} vs {1})")]
    ContextMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    /// All retained digits cancelled; the caller should retry at a higher precision.
    #[error("insufficient precision: all retained digits cancelled")]
    InsufficientPrecision,
    #[error("precision cap exhausted at {0} digits")]
    PrecisionCapExhausted(u32),
    #[error("value is not a square in Q_p")]
    NotASquare,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular to working precision")]
    SingularToPrecision,
    #[error("generators do not span a full-rank lattice")]
    RankDeficient,
    #[error("quadratic form is degenerate")]
    Degenerate,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("value is not represented by the form")]
    NotRepresented,
    #[error("forms have different invariants")]
    InvariantMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}

impl Error {
    /// Errors that a retry at a higher working precision may cure.
    pub fn is_precision_loss(&self) -> bool {
        matches!(self, Error::InsufficientPrecision | Error::SingularToPrecision)
    }
}

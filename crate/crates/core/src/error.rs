use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("group order must be at least {min}, got {n}")]
    InvalidOrder { n: u64, min: u64 },

    #[error("generator exponent {g} is not primitive modulo {n} (gcd = {gcd})")]
    NotPrimitive { n: u64, g: u64, gcd: u64 },

    #[error("generator exponent {g} out of range for order {n}")]
    InvalidGenerator { n: u64, g: u64 },

    #[error("angular precision must be in 1..={max} bits, got {p}")]
    InvalidPrecision { p: u32, max: u32 },

    #[error("operands belong to different groups")]
    ParamsMismatch,

    #[error("tolerance {num}/{den} outside [0, 1/2)")]
    InvalidTolerance { num: u64, den: u64 },

    #[error("angle {t} is within tolerance of a decision boundary; exponent is ambiguous")]
    AmbiguousAngle { t: u128 },

    #[error("signatures need a prime group order >= 5, got {n}")]
    CompositeOrder { n: u64 },

    #[error("precision {p} is below the exponent recovery bound for n = {n}")]
    InsufficientPrecision { n: u64, p: u32 },

    #[error("message does not fit below the group order {n}")]
    MessageTooLarge { n: u64 },

    #[error("group order {n} exceeds the exhaustive search limit {limit}")]
    OrderTooLarge { n: u64, limit: u64 },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("inconsistent key: {0}")]
    Consistency(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("{step}: {message}")]
    Io { step: String, message: String },
}

impl Error {
    pub(crate) fn io(step: impl Into<String>, err: std::io::Error) -> Self {
        Error::Io {
            step: step.into(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

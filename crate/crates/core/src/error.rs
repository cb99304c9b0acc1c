use num_bigint::BigUint;
use thiserror::Error;

/// Errors raised by the group-theoretic routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("point {point} repeated in cycle notation")]
    RepeatedPoint { point: u32 },

    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: u64, degree: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("image array is not a bijection on 0..{degree}")]
    NotBijection { degree: usize },

    #[error("group order {order} exceeds enumeration cap {cap}")]
    CapExceeded { order: BigUint, cap: u64 },

    #[error("action degree {degree} exceeds degree cap {cap}")]
    DegreeCapExceeded { degree: BigUint, cap: u64 },

    #[error("order mismatch for {name}: expected {expected}, computed {computed}")]
    OrderMismatch {
        name: String,
        expected: BigUint,
        computed: BigUint,
    },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

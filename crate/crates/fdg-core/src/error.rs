use thiserror::Error;

/// Errors produced by the decomposition library.
#[derive(Debug, Error)]
pub enum FdgError {
    #[error("dimension mismatch: expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("component {index} = {value} lies outside [{lower}, {upper}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("variable index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },

    #[error("donor length {donor} does not match subset size {subset}")]
    DonorMismatch { donor: usize, subset: usize },

    #[error("variable subsets must be nonempty and disjoint")]
    InvalidSubsets,

    #[error("indicator distribution analysis needs at least two values, got {got}")]
    TooFewIndicators { got: usize },

    #[error("indicator value {value} is below machine precision")]
    IndicatorBelowEpsilon { value: f64 },

    #[error("gap factor {value} outside the supported range [1e3, 1e8]")]
    GapFactorOutOfRange { value: f64 },

    #[error("pairwise oracle capped at {cap} variables, problem has {dimension}")]
    OracleCapExceeded { dimension: usize, cap: usize },

    #[error("invalid benchmark spec: {0}")]
    InvalidSpec(String),

    #[error("not a partition of the same index set: {0}")]
    NotAPartition(String),

    #[error("invalid probability parameters: {0}")]
    InvalidProbability(String),
}

pub type Result<T> = std::result::Result<T, FdgError>;

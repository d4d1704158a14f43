use alloc::string::String;

/// Everything that can go wrong in this crate.
#[allow(missing_docs)]
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("order {order} is invalid for dimension {dim} (need 2 <= n <= d)")]
    InvalidOrder { order: usize, dim: usize },

    #[error("tuple of {count} vectors exceeds dimension {dim}")]
    TooManyVectors { count: usize, dim: usize },

    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("empty input")]
    Empty,

    #[error("anchor vectors are linearly dependent")]
    DependentAnchors,

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unknown builtin operator `{0}`")]
    UnknownBuiltin(String),

    #[error("invalid parameters for builtin `{name}`: {reason}")]
    InvalidBuiltin { name: String, reason: String },

    #[error("operator is not linear (affine offset must be zero)")]
    NotLinear,

    #[error("sample budget must be at least 1")]
    EmptyBudget,

    #[error("invalid {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("contraction constant alpha = {0} is outside (0, 1)")]
    AlphaOutOfRange(f64),

    #[error("Kannan constant beta = {0} is outside (0, 1/2)")]
    BetaOutOfRange(f64),

    #[error("sampled {name} = {sampled} exceeds declared value {declared}")]
    ConstantViolated {
        name: &'static str,
        declared: f64,
        sampled: f64,
    },

    #[error("ball precondition violated: ||x0 - Tx0, b|| = {lhs} is not < (1 - alpha) r = {rhs}")]
    BallPrecondition { lhs: f64, rhs: f64 },

    #[error("iterate {step} left the closed ball: ||x0 - x_k, b|| = {distance} > r = {radius}")]
    ContainmentViolated {
        step: usize,
        distance: f64,
        radius: f64,
    },

    #[error("non-finite iterate at step {0}")]
    NonFiniteIterate(usize),

    #[error("invalid coefficient sequence: {0}")]
    InvalidSequence(String),

    #[error("solver regime mismatch: expected {expected}, found {found}")]
    RegimeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("product ball radii violate r + r' < r1: {sum} >= {r1}")]
    ProductRadii { sum: f64, r1: f64 },
}

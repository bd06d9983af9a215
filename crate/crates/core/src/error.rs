use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("finite space must contain at least one point")]
    EmptySpace,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("negative probability {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("density does not sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("operator is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("activation `{name}` evaluated outside its domain at {value}")]
    Domain { name: String, value: f64 },

    #[error("epsilon floor must lie in (0, 1), got {0}")]
    InvalidEps(f64),

    #[error("parameters are not at alignment: ||q(theta) - p|| = {distance}")]
    NotAligned { distance: f64 },

    #[error("density has a zero entry at index {index}; log-density gradients are undefined")]
    ZeroDensity { index: usize },

    #[error("support of p is not contained in the support of q (index {index})")]
    SupportViolation { index: usize },

    #[error("parameter vector is outside the generator domain: {0}")]
    InvalidParameters(String),

    #[error("a distribution family needs at least two members, got {0}")]
    FamilyTooSmall(usize),

    #[error("algebraic rearrangement mismatch: {pairwise} vs {rearranged}")]
    RearrangementMismatch { pairwise: f64, rearranged: f64 },

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("duplicate {kind} registration `{name}`")]
    DuplicateStrategy { kind: &'static str, name: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

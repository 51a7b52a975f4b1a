use thiserror::Error;

use crate::setfunc::SubsetMask;

/// Errors for capacity, integral, and transport computations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("ground set must have between 1 and {max} elements, got {got}")]
    GroundSize { got: usize, max: usize },

    #[error("duplicate ground-set label `{0}`")]
    DuplicateLabel(String),

    #[error("expected {expected} lattice values (2^n), got {got}")]
    ValueCount { expected: usize, got: usize },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("capacity not grounded: value at the empty set is {0:e}")]
    NotGrounded(f64),

    #[error("capacity not normalized: value at the full set is {0}")]
    NotNormalized(f64),

    #[error(
        "capacity not monotone: value {lo_value} at mask {lo:?} exceeds value {hi_value} at cover mask {hi:?}"
    )]
    NotMonotone {
        lo: SubsetMask,
        hi: SubsetMask,
        lo_value: f64,
        hi_value: f64,
    },

    #[error("weight at position {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weights must sum to 1, got {0}")]
    WeightSum(f64),

    #[error("invalid distortion: {0}")]
    BadDistortion(String),

    #[error("operands live on different ground sets")]
    GroundMismatch,

    #[error("map sends element {index} to {target}, outside a ground set of size {size}")]
    MapOutOfRange {
        index: usize,
        target: usize,
        size: usize,
    },

    #[error("conditioning on a null set (mask {0:?})")]
    ConditionOnNull(SubsetMask),

    #[error("functional is not representable by a capacity: {0}")]
    NonRepresentable(Box<Error>),

    #[error("malformed linear program: {0}")]
    LpMalformed(String),

    #[error("numerical failure in LP solve: {0}")]
    LpNumerical(String),

    #[error("cost entry ({i},{j}) must be finite and nonnegative, got {value}")]
    BadCost { i: usize, j: usize, value: f64 },

    #[error("product ground set has {cells} cells, above the limit {limit}")]
    SizeGuard { cells: usize, limit: usize },

    #[error("operation requires additive marginals")]
    NotAdditive,

    #[error("solved plan failed validation: {0}")]
    PlanValidation(Box<Error>),

    #[error("invalid cycle: {0}")]
    BadCycle(String),

    #[error("cycle point ({x},{y}) carries no plan mass")]
    ZeroMassCyclePoint { x: usize, y: usize },

    #[error("support set is empty")]
    EmptySupport,

    #[error("support set is not c-cyclically monotone (cycle weight {weight})")]
    NotCyclicallyMonotone { weight: f64 },

    #[error("dual enumeration guard: ground sizes {n} and {m} exceed the permutation budget")]
    DualGuard { n: usize, m: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

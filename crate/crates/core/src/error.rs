use thiserror::Error;

use crate::grid::{GridPoint, GridShape};
use crate::transfer::TransferSystem;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point} lies outside the grid {shape}")]
    OutOfShape { point: GridPoint, shape: GridShape },

    #[error("lattice element {0} is out of range")]
    OutOfRange(usize),

    #[error("pair {0} -> {1} does not refine the lattice order")]
    NotComparable(String, String),

    #[error("shape {shape} exceeds the supported limit ({limit})")]
    ShapeTooLarge { shape: GridShape, limit: String },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: GridShape, found: GridShape },

    #[error("relation is not a transfer system: {0}")]
    NotTransferSystem(String),

    #[error("transfer system is not saturated")]
    NotSaturated,

    #[error("not a saturated cover: {0}")]
    InvalidCover(String),

    #[error("invalid code pair: {0}")]
    InvalidCodes(String),

    #[error("the classification map needs at least one row (n >= 1)")]
    NoTopRow,

    #[error("invalid class label: {0}")]
    InvalidLabel(String),

    #[error("cover is not in the fiber of the label: {0}")]
    FiberMismatch(String),

    #[error("search budget of {budget} exceeded while {task}")]
    BudgetExceeded { task: String, budget: u64 },

    #[error("truncation order {order} is too small for coefficient ({m}, {n})")]
    InsufficientOrder { m: usize, n: usize, order: usize },

    #[error("series coefficient ({m}, {n}) is not a non-negative integer: {value}")]
    NonIntegralCoefficient { m: usize, n: usize, value: String },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("{divisor} does not divide {modulus}")]
    NotADivisor { divisor: u64, modulus: u64 },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("realization of a {shape} system failed verification")]
    VerificationFailed {
        shape: GridShape,
        target: Box<TransferSystem>,
        produced: Box<TransferSystem>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

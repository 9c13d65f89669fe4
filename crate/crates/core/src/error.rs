use thiserror::Error;

use crate::rle::Letter;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty string")]
    EmptyString,

    #[error("zero run count for letter {0}")]
    ZeroRunCount(Letter),

    #[error("position out of bounds: {position} not in [1, {length}]")]
    PositionOutOfBounds { position: u64, length: u64 },

    #[error("point ({i}, {j}) outside the {m}x{n} grid")]
    PointOutOfRange { i: u64, j: u64, m: u64, n: u64 },

    #[error("unknown letter {0}")]
    UnknownLetter(Letter),

    #[error("below unit distance: {0}")]
    BelowUnitDistance(String),

    #[error("sub-unit nonzero distance {value} for letters {a}, {b}")]
    SubUnitDistance { a: Letter, b: Letter, value: String },

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(String),

    #[error("poly mode requires epsilon < 1, got {0}")]
    PolyEpsilonTooLarge(String),

    #[error("distance is not constant-bounded (values must be 0 or 1)")]
    NotConstantBounded,

    #[error("instance too large for exact DP: {cells} cells exceeds cap {cap}")]
    InstanceTooLarge { cells: u128, cap: u128 },

    #[error("point ({i}, {j}) is not on a {boundary} boundary")]
    NotOnBoundary { i: u64, j: u64, boundary: &'static str },

    #[error("not an h-to-v shape: {0}")]
    NotHtoVShape(String),

    #[error("not a v-to-h shape: {0}")]
    NotVtoHShape(String),

    #[error("not a warping path: {0}")]
    NotAWarpingPath(String),

    #[error("no path from source to sink")]
    NoPath,

    #[error("edge ({0:?} -> {1:?}) violates coordinate monotonicity")]
    NonMonotoneEdge((u64, u64), (u64, u64)),

    #[error("invalid generator spec: {0}")]
    InvalidGenSpec(String),

    #[error("ratio violation (seed {seed}, eps {epsilon}): exact {exact}, approx {approx}")]
    RatioViolation {
        seed: u64,
        epsilon: String,
        exact: String,
        approx: String,
    },

    #[error("report output failed: {0}")]
    Report(String),
}

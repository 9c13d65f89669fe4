//! Dynamic time warping distance between run-length encoded strings.
//!
//! The exact engine is the textbook quadratic dynamic program. The
//! approximate engines work on the `k x l` grid of run blocks and return a
//! value `v` with `DTW <= v <= (1 + eps) * DTW`, in time governed by the
//! number of runs rather than the decoded lengths.

pub mod bench;
pub mod cost;
pub mod dtw;
pub mod error;
pub mod grid;
pub mod metric;
pub mod ratio;
pub mod rle;
pub mod snap;

pub use error::{Error, Result};
pub use grid::{build_block_grid, BetaStats, Block, BlockGrid};
pub use metric::{cpow, round_distance_fn, DistanceFn, DistanceKind, MatrixDistance};
pub use rle::{hat_index, rle_decode, rle_encode, HatIndex, Letter, RleString, Run};

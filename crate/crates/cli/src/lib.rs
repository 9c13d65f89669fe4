//! Plumbing behind the `rle-dtw` binary: input loading, mode dispatch, JSON
//! rendering and the error-code table.

pub mod input;

use num_rational::BigRational;
use num_traits::One;
use rle_dtw::dtw::{self, DtwResult};
use rle_dtw::{ratio, DistanceFn, RleString};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },

    #[error("invalid epsilon {0:?}: expected a decimal or p/q")]
    BadEpsilon(String),

    #[error("this mode needs --epsilon")]
    MissingEpsilon,

    #[error("{0}")]
    Usage(String),

    /// The reader of standard output went away; not reported.
    #[error("output closed")]
    OutputClosed,

    #[error(transparent)]
    Core(#[from] rle_dtw::Error),
}

impl CliError {
    /// Stable machine-readable code and process exit status.
    pub fn code(&self) -> (&'static str, i32) {
        use rle_dtw::Error as E;
        match self {
            CliError::Usage(_) => ("usage", 2),
            CliError::Io { .. } => ("io_error", 3),
            CliError::Parse { .. } => ("parse_error", 4),
            CliError::BadEpsilon(_) => ("bad_epsilon", 5),
            CliError::MissingEpsilon => ("missing_epsilon", 6),
            CliError::OutputClosed => ("output_closed", 0),
            CliError::Core(e) => match e {
                E::EmptyString => ("empty_string", 10),
                E::ZeroRunCount(_) => ("zero_run_count", 11),
                E::PositionOutOfBounds { .. } => ("position_out_of_bounds", 12),
                E::PointOutOfRange { .. } => ("point_out_of_range", 13),
                E::UnknownLetter(_) => ("unknown_letter", 14),
                E::BelowUnitDistance(_) => ("below_unit_distance", 15),
                E::SubUnitDistance { .. } => ("sub_unit_distance", 16),
                E::InvalidMatrix(_) => ("invalid_matrix", 17),
                E::NonPositiveEpsilon(_) => ("non_positive_epsilon", 18),
                E::PolyEpsilonTooLarge(_) => ("poly_epsilon_too_large", 19),
                E::NotConstantBounded => ("not_constant_bounded", 20),
                E::InstanceTooLarge { .. } => ("instance_too_large", 21),
                E::NotOnBoundary { .. } => ("not_on_boundary", 22),
                E::NotHtoVShape(_) => ("not_htov_shape", 23),
                E::NotVtoHShape(_) => ("not_vtoh_shape", 24),
                E::NotAWarpingPath(_) => ("not_a_warping_path", 25),
                E::NoPath => ("no_path", 26),
                E::NonMonotoneEdge(..) => ("non_monotone_edge", 27),
                E::InvalidGenSpec(_) => ("invalid_gen_spec", 28),
                E::RatioViolation { .. } => ("ratio_violation", 29),
                E::Report(_) => ("report_error", 30),
            },
        }
    }

    pub fn to_json(&self) -> Value {
        let (code, exit) = self.code();
        json!({ "error": { "code": code, "exit_code": exit, "message": self.to_string() } })
    }
}

/// Maps a write failure on standard output.
pub fn stdout_error(e: std::io::Error) -> CliError {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        CliError::OutputClosed
    } else {
        CliError::Io {
            path: "<stdout>".into(),
            message: e.to_string(),
        }
    }
}

pub fn parse_epsilon(s: &str) -> Result<BigRational, CliError> {
    ratio::parse_decimal(s).ok_or_else(|| CliError::BadEpsilon(s.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ApproxMode {
    Direct,
    Poly,
    /// Direct for 0/1-valued distances, otherwise poly (direct when eps >= 1).
    Auto,
}

pub fn run_exact(x: &RleString, y: &RleString, d: &DistanceFn) -> Result<DtwResult, CliError> {
    Ok(dtw::exact_dtw_dp(x, y, d)?)
}

pub fn run_approx(
    x: &RleString,
    y: &RleString,
    d: &DistanceFn,
    eps: &BigRational,
    mode: ApproxMode,
) -> Result<DtwResult, CliError> {
    let r = match mode {
        ApproxMode::Direct => dtw::approx_dtw(x, y, d, eps)?,
        ApproxMode::Poly => dtw::approx_dtw_poly(x, y, d, eps)?,
        ApproxMode::Auto if d.is_constant_bounded() => dtw::approx_dtw_hamming(x, y, d, eps)?,
        ApproxMode::Auto if *eps >= BigRational::one() => dtw::approx_dtw(x, y, d, eps)?,
        ApproxMode::Auto => dtw::approx_dtw_poly(x, y, d, eps)?,
    };
    Ok(r)
}

pub fn result_json(r: &DtwResult) -> Value {
    let s = &r.stats;
    json!({
        "value": ratio::render(&r.value),
        "mode": r.mode.label(),
        "epsilon": r.epsilon.as_ref().map(ratio::render),
        "stats": {
            "k": s.k,
            "l": s.l,
            "m": s.m,
            "n": s.n,
            "vertices": s.vertices,
            "edges": s.edges,
            "beta_star": s.beta_star,
            "elapsed_ms": s.elapsed.as_secs_f64() * 1e3,
        }
    })
}

/// Largest `k * l` accepted by the graph dump.
pub const GRAPH_DUMP_MAX_BLOCKS: u128 = 2_500;

/// One JSON object per edge, in construction order.
pub fn graph_dump_lines(
    x: &RleString,
    y: &RleString,
    d: &DistanceFn,
    eps: &BigRational,
) -> Result<Vec<String>, CliError> {
    let blocks = (x.run_count() * y.run_count()) as u128;
    if blocks > GRAPH_DUMP_MAX_BLOCKS {
        return Err(rle_dtw::Error::InstanceTooLarge {
            cells: blocks,
            cap: GRAPH_DUMP_MAX_BLOCKS,
        }
        .into());
    }
    let grid = rle_dtw::build_block_grid(x, y, d)?;
    let graph = dtw::build_graph(&grid, eps)?;
    Ok(graph
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (graph.point(e.from), graph.point(e.to));
            json!({
                "from": [a.i, a.j],
                "to": [b.i, b.j],
                "w": ratio::render(&grid.to_rational(&e.weight)),
                "kind": e.kind.label(),
            })
            .to_string()
        })
        .collect())
}

pub fn grid_dump(x: &RleString, y: &RleString, d: &DistanceFn) -> Result<Value, CliError> {
    let grid = rle_dtw::build_block_grid(x, y, d)?;
    serde_json::to_value(grid.dump()).map_err(|e| CliError::Usage(e.to_string()))
}

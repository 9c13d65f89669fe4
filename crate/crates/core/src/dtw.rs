//! DTW entry points: the quadratic oracle, the single-run closed form, the
//! three approximation modes, and full-path decomposition.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cost::{Cost, CostWidth};
use crate::error::{Error, Result};
use crate::grid::{BlockCosts, BlockGrid};
use crate::metric::{round_distance_fn, DistanceFn};
use crate::ratio;
use crate::rle::{Letter, RleString};
use crate::snap::{build_edges, build_ladder, generate_snap_points, ApproxGraph, Point};

/// Default cell budget of [`exact_dtw_dp`].
pub const DEFAULT_EXACT_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    #[serde(rename = "exact-dp")]
    ExactDp,
    #[serde(rename = "approx-direct")]
    ApproxDirect,
    #[serde(rename = "approx-poly")]
    ApproxPoly,
    #[serde(rename = "approx-hamming")]
    ApproxHamming,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::ExactDp => "exact-dp",
            Mode::ApproxDirect => "approx-direct",
            Mode::ApproxPoly => "approx-poly",
            Mode::ApproxHamming => "approx-hamming",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DtwStats {
    pub k: usize,
    pub l: usize,
    pub m: u64,
    pub n: u64,
    /// Zero for the exact engine.
    pub vertices: usize,
    pub edges: usize,
    pub beta_star: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtwResult {
    pub value: BigRational,
    pub mode: Mode,
    pub epsilon: Option<BigRational>,
    pub stats: DtwStats,
}

fn base_stats(x: &RleString, y: &RleString) -> DtwStats {
    DtwStats {
        k: x.run_count(),
        l: y.run_count(),
        m: x.len(),
        n: y.len(),
        ..DtwStats::default()
    }
}

/// Quadratic DP over decoded positions with a default budget of `10^8` cells.
pub fn exact_dtw_dp(x: &RleString, y: &RleString, d: &DistanceFn) -> Result<DtwResult> {
    exact_dtw_dp_with_cap(x, y, d, DEFAULT_EXACT_CAP)
}

pub fn exact_dtw_dp_with_cap(x: &RleString, y: &RleString, d: &DistanceFn, cap: u128) -> Result<DtwResult> {
    let started = Instant::now();
    let cells = u128::from(x.len()) * u128::from(y.len());
    if cells > cap {
        return Err(Error::InstanceTooLarge { cells, cap });
    }
    let costs = BlockCosts::evaluate(x, y, d)?;
    let scaled = costs.scaled();
    let value = match costs.width_for(x, y) {
        CostWidth::U64 => scaled.to_rational(exact_scaled::<u64>(&scaled.convert(), x, y).to_biguint()),
        CostWidth::U128 => scaled.to_rational(exact_scaled::<u128>(&scaled.convert(), x, y).to_biguint()),
        CostWidth::Big => scaled.to_rational(exact_scaled::<BigUint>(&scaled.convert(), x, y)),
    };
    let mut stats = base_stats(x, y);
    stats.elapsed = started.elapsed();
    Ok(DtwResult {
        value,
        mode: Mode::ExactDp,
        epsilon: None,
        stats,
    })
}

/// Two-row DP; rows run along the shorter string, which is decoded on the
/// fly from its runs.
fn exact_scaled<W: Cost>(costs: &[W], x: &RleString, y: &RleString) -> W {
    let k = x.run_count();
    let transposed = y.len() > x.len();
    let (outer, inner) = if transposed { (y, x) } else { (x, y) };
    let width = inner.len() as usize;
    let mut prev: Vec<W> = vec![W::zero(); width];
    let mut cur: Vec<W> = vec![W::zero(); width];
    let mut first = true;
    for (o, orun) in outer.runs().iter().enumerate() {
        for _ in 0..orun.count {
            let mut at = 0usize;
            for (r, irun) in inner.runs().iter().enumerate() {
                let c = if transposed {
                    &costs[o * k + r]
                } else {
                    &costs[r * k + o]
                };
                for _ in 0..irun.count {
                    let best = if first {
                        if at == 0 {
                            None
                        } else {
                            Some(&cur[at - 1])
                        }
                    } else if at == 0 {
                        Some(&prev[0])
                    } else {
                        Some((&prev[at]).min(&prev[at - 1]).min(&cur[at - 1]))
                    };
                    cur[at] = match best {
                        Some(b) => b.plus(c),
                        None => c.clone(),
                    };
                    at += 1;
                }
            }
            std::mem::swap(&mut prev, &mut cur);
            first = false;
        }
    }
    prev.pop().expect("non-empty string")
}

/// DTW between `a0` repeated `m` times and `y`, in `O(runs of y)`.
///
/// Each position of `y` is matched at least once; when `m > n` the surplus
/// copies of `a0` all sit on the cheapest letter of `y`.
pub fn dtw_run_vs_string(a0: Letter, m: u64, y: &RleString, d: &DistanceFn) -> Result<BigRational> {
    if m == 0 {
        return Err(Error::EmptyString);
    }
    let mut sum = BigRational::zero();
    let mut cheapest: Option<BigRational> = None;
    for run in y.runs() {
        let v = d.distance(a0, run.letter)?;
        sum += &v * ratio::from_u64(run.count);
        if cheapest.as_ref().is_none_or(|c| v < *c) {
            cheapest = Some(v);
        }
    }
    let n = y.len();
    if m > n {
        sum += cheapest.expect("non-empty string") * ratio::from_u64(m - n);
    }
    Ok(sum)
}

/// `(1 + eps)`-approximation on the block grid for any `eps > 0`.
pub fn approx_dtw(x: &RleString, y: &RleString, d: &DistanceFn, epsilon: &BigRational) -> Result<DtwResult> {
    approx_with_mode(x, y, d, epsilon, epsilon, Mode::ApproxDirect)
}

/// Polynomially bounded integer distances: rounds every nonzero distance up
/// to a power of `1 + eps1` and runs the direct engine at `eps2`, with
/// `eps1 = eps/2 - eps^2/2` and `eps2 = eps/2`. Requires `0 < eps < 1`.
pub fn approx_dtw_poly(x: &RleString, y: &RleString, d: &DistanceFn, epsilon: &BigRational) -> Result<DtwResult> {
    if !epsilon.is_positive() {
        return Err(Error::NonPositiveEpsilon(ratio::render(epsilon)));
    }
    if *epsilon >= BigRational::one() {
        return Err(Error::PolyEpsilonTooLarge(ratio::render(epsilon)));
    }
    let (eps1, eps2) = poly_split(epsilon);
    let rounded = round_distance_fn(d.clone(), eps1)?.into_distance_fn();
    approx_with_mode(x, y, &rounded, &eps2, epsilon, Mode::ApproxPoly)
}

/// `(eps/2 - eps^2/2, eps/2)`.
pub fn poly_split(epsilon: &BigRational) -> (BigRational, BigRational) {
    let half = BigRational::new(1.into(), 2.into());
    let eps2 = epsilon * &half;
    let eps1 = &eps2 - epsilon * epsilon * &half;
    (eps1, eps2)
}

/// Distances valued in `{0, 1}`: the successor chains have length at most
/// two, so the direct engine already runs in near `k * l / eps^2` time.
pub fn approx_dtw_hamming(x: &RleString, y: &RleString, d: &DistanceFn, epsilon: &BigRational) -> Result<DtwResult> {
    if !d.is_constant_bounded() {
        return Err(Error::NotConstantBounded);
    }
    approx_with_mode(x, y, d, epsilon, epsilon, Mode::ApproxHamming)
}

fn approx_with_mode(
    x: &RleString,
    y: &RleString,
    d: &DistanceFn,
    engine_eps: &BigRational,
    reported_eps: &BigRational,
    mode: Mode,
) -> Result<DtwResult> {
    if !engine_eps.is_positive() {
        return Err(Error::NonPositiveEpsilon(ratio::render(engine_eps)));
    }
    let started = Instant::now();
    let costs = BlockCosts::evaluate(x, y, d)?;
    let (value, mut stats) = match costs.width_for(x, y) {
        CostWidth::U64 => approx_core::<u64>(x, y, &costs, engine_eps)?,
        CostWidth::U128 => approx_core::<u128>(x, y, &costs, engine_eps)?,
        CostWidth::Big => approx_core::<BigUint>(x, y, &costs, engine_eps)?,
    };
    stats.elapsed = started.elapsed();
    Ok(DtwResult {
        value,
        mode,
        epsilon: Some(reported_eps.clone()),
        stats,
    })
}

fn approx_core<W: Cost>(
    x: &RleString,
    y: &RleString,
    costs: &BlockCosts,
    epsilon: &BigRational,
) -> Result<(BigRational, DtwStats)> {
    let grid = BlockGrid::<W>::from_costs(x, y, costs);
    let graph = build_graph(&grid, epsilon)?;
    let (m, n) = (grid.m(), grid.n());
    let dist = graph.shortest_path_dag(Point::new(1, 1), Point::new(m, n))?;
    let last = grid.cost0(grid.k() - 1, grid.l() - 1);
    let mut stats = base_stats(x, y);
    stats.vertices = graph.vertices().len();
    stats.edges = graph.edges().len();
    stats.beta_star = grid.beta_stats().beta_star;
    Ok((grid.to_rational(&dist.plus(last)), stats))
}

/// Ladder, snap points and edges for an already built grid.
pub fn build_graph<W: Cost>(grid: &BlockGrid<W>, epsilon: &BigRational) -> Result<ApproxGraph<W>> {
    let ladder = build_ladder(epsilon, grid.m().max(grid.n()))?;
    let snaps = generate_snap_points(grid, &ladder);
    build_edges(grid, &snaps, &ladder)
}

/// A sequence of cells, each an h-, v- or d-step after the previous one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarpPath {
    points: Vec<Point>,
}

impl WarpPath {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::NotAWarpingPath("empty path".into()));
        }
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let ok = (b.i == a.i || b.i == a.i + 1) && (b.j == a.j || b.j == a.j + 1) && a != b;
            if !ok {
                return Err(Error::NotAWarpingPath(format!("{a} -> {b} is not a step")));
            }
        }
        Ok(WarpPath { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_full(&self, m: u64, n: u64) -> bool {
        self.points[0] == Point::new(1, 1) && *self.points.last().unwrap() == Point::new(m, n)
    }

    /// Sum of `d(x_i, y_j)` over every cell of the path.
    pub fn cost(&self, x: &RleString, y: &RleString, d: &DistanceFn) -> Result<BigRational> {
        let mut sum = BigRational::zero();
        for p in &self.points {
            sum += d.distance(x.letter_at(p.i)?, y.letter_at(p.j)?)?;
        }
        Ok(sum)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ComponentKind {
    HtoV,
    VtoH,
}

/// Path points `start..=end` forming one maximal component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PathComponent {
    pub kind: ComponentKind,
    pub start: usize,
    pub end: usize,
}

/// Splits a full path into alternating h-to-v and v-to-h components.
///
/// An h-to-v component starts on a lower block boundary and runs while the
/// path stays in the same run of `x`, so it ends on that run's right edge; a
/// v-to-h component does the same with rows and runs of `y`.
pub fn decompose_full_path<W: Cost>(path: &WarpPath, grid: &BlockGrid<W>) -> Result<Vec<PathComponent>> {
    let (m, n) = (grid.m(), grid.n());
    if !path.is_full(m, n) {
        return Err(Error::NotAWarpingPath(format!(
            "path does not run from (1, 1) to ({m}, {n})"
        )));
    }
    let pts = path.points();
    for p in pts {
        grid.block_of_point(p.i, p.j)
            .map_err(|_| Error::NotAWarpingPath(format!("{p} is outside the grid")))?;
    }
    let (x, y) = (grid.x(), grid.y());
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut kind = ComponentKind::HtoV;
    while start < pts.len() {
        let s = pts[start];
        let mut end = start;
        match kind {
            ComponentKind::HtoV => {
                let r = x.run_end(x.run_of(s.i));
                while end + 1 < pts.len() && pts[end + 1].i <= r {
                    end += 1;
                }
            }
            ComponentKind::VtoH => {
                let t = y.run_end(y.run_of(s.j));
                while end + 1 < pts.len() && pts[end + 1].j <= t {
                    end += 1;
                }
            }
        }
        out.push(PathComponent { kind, start, end });
        start = end + 1;
        kind = match kind {
            ComponentKind::HtoV => ComponentKind::VtoH,
            ComponentKind::VtoH => ComponentKind::HtoV,
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::rational;

    fn s(t: &str) -> RleString {
        RleString::from_text(t).unwrap()
    }

    #[test]
    fn sample_exact() {
        let r = exact_dtw_dp(&s("aaabbbbddd"), &s("aabcdd"), &DistanceFn::AbsDiff).unwrap();
        assert_eq!(r.value, rational(1, 1));
        assert_eq!(r.mode, Mode::ExactDp);
    }

    #[test]
    fn digit_examples() {
        let d = DistanceFn::AbsDiff;
        let v = |a: &str, b: &str| exact_dtw_dp(&s(a), &s(b), &d).unwrap().value;
        assert_eq!(v("111110", "100000"), rational(0, 1));
        assert_eq!(v("100000", "000000"), rational(1, 1));
        assert_eq!(v("111110", "000000"), rational(5, 1));
    }

    #[test]
    fn cap_is_enforced() {
        let x = s("ab");
        let err = exact_dtw_dp_with_cap(&x, &x, &DistanceFn::Hamming, 3).unwrap_err();
        assert_eq!(err, Error::InstanceTooLarge { cells: 4, cap: 3 });
    }

    #[test]
    fn run_vs_string_examples() {
        let d = DistanceFn::AbsDiff;
        let a = Letter::from('a');
        assert_eq!(dtw_run_vs_string(a, 2, &s("abc"), &d).unwrap(), rational(3, 1));
        assert_eq!(dtw_run_vs_string(a, 5, &s("ab"), &d).unwrap(), rational(1, 1));
        assert_eq!(dtw_run_vs_string(a, 1, &s("a"), &d).unwrap(), rational(0, 1));
    }

    #[test]
    fn sample_approx_is_exact() {
        let (x, y) = (s("aaabbbbddd"), s("aabcdd"));
        let eps = rational(1, 2);
        let r = approx_dtw(&x, &y, &DistanceFn::AbsDiff, &eps).unwrap();
        assert_eq!(r.value, rational(1, 1));
        let p = approx_dtw_poly(&x, &y, &DistanceFn::AbsDiff, &eps).unwrap();
        assert!(p.value >= rational(1, 1) && p.value <= rational(3, 2));
        assert_eq!(p.mode, Mode::ApproxPoly);
    }

    #[test]
    fn identical_strings_cost_nothing() {
        let x = s("aabbbcddddde");
        for eps in [rational(1, 10), rational(2, 1)] {
            assert!(approx_dtw(&x, &x, &DistanceFn::AbsDiff, &eps).unwrap().value.is_zero());
        }
        let p = approx_dtw_poly(&x, &x, &DistanceFn::AbsDiff, &rational(1, 2)).unwrap();
        assert!(p.value.is_zero());
    }

    #[test]
    fn poly_rejects_large_epsilon() {
        let x = s("ab");
        let err = approx_dtw_poly(&x, &x, &DistanceFn::AbsDiff, &rational(1, 1)).unwrap_err();
        assert!(matches!(err, Error::PolyEpsilonTooLarge(_)));
        assert!(approx_dtw(&x, &x, &DistanceFn::AbsDiff, &rational(0, 1)).is_err());
    }

    #[test]
    fn hamming_mode_requires_constant_bound() {
        let x = s("ab");
        assert_eq!(
            approx_dtw_hamming(&x, &x, &DistanceFn::AbsDiff, &rational(1, 2)).unwrap_err(),
            Error::NotConstantBounded
        );
        let r = approx_dtw_hamming(&s("aab"), &s("abb"), &DistanceFn::Hamming, &rational(1, 2)).unwrap();
        assert_eq!(r.mode, Mode::ApproxHamming);
        assert!(r.value.is_zero());
    }

    #[test]
    fn poly_split_values() {
        let (e1, e2) = poly_split(&rational(1, 2));
        assert_eq!(e1, rational(1, 8));
        assert_eq!(e2, rational(1, 4));
    }

    #[test]
    fn warp_path_validation() {
        let p = |i, j| Point::new(i, j);
        assert!(WarpPath::new(vec![p(1, 1), p(2, 2), p(2, 3)]).is_ok());
        assert!(WarpPath::new(vec![p(1, 1), p(3, 2)]).is_err());
        assert!(WarpPath::new(vec![p(1, 1), p(1, 1)]).is_err());
        assert!(WarpPath::new(vec![]).is_err());
    }

    #[test]
    fn single_block_diagonal_is_one_component() {
        let x = s("aaaa");
        let g = crate::grid::build_block_grid(&x, &x, &DistanceFn::AbsDiff).unwrap();
        let path = WarpPath::new((1..=4).map(|v| Point::new(v, v)).collect()).unwrap();
        let parts = decompose_full_path(&path, &g).unwrap();
        assert_eq!(
            parts,
            vec![PathComponent {
                kind: ComponentKind::HtoV,
                start: 0,
                end: 3
            }]
        );
    }
}

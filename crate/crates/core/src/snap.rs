//! Sparse vertex set on block boundaries and the weighted DAG over it.
//!
//! Every block keeps four sorted coordinate lists, one per boundary, seeded
//! from its corners plus geometric offsets. The union of those points is the
//! vertex set. Edges either take one grid step, walk along a boundary, or
//! summarize a whole diagonal-horizontal-diagonal-vertical route
//! (`HtoV`) or its mirror (`VtoH`) whose cost comes from the prefix tables.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::grid::{Block, BlockGrid};

/// A cell `(i, j)`: column `i` of `x`, row `j` of `y`, both one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Point {
    pub i: u64,
    pub j: u64,
}

impl Point {
    pub const fn new(i: u64, j: u64) -> Self {
        Point { i, j }
    }

    /// Sort key compatible with every monotone edge.
    #[inline]
    pub fn topo_key(self) -> (u64, u64) {
        (self.i + self.j, self.i)
    }

    /// `self <= other` componentwise and `self != other`.
    pub fn strictly_precedes(self, other: Point) -> bool {
        self.i <= other.i && self.j <= other.j && self != other
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Distinct values of `floor((1 + eps)^t)` for `t = 0, 1, ...`, stopping at
/// the first value `>= limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeomLadder {
    values: Vec<u64>,
}

pub fn build_ladder(epsilon: &BigRational, limit: u64) -> Result<GeomLadder> {
    if *epsilon <= BigRational::from_integer(0.into()) {
        return Err(Error::NonPositiveEpsilon(epsilon.to_string()));
    }
    let factor = BigRational::one() + epsilon;
    let mut p = BigRational::one();
    let mut values: Vec<u64> = Vec::new();
    loop {
        let v = p.floor().to_integer().to_u64().unwrap_or(u64::MAX);
        if values.last().is_none_or(|&last| v > last) {
            values.push(v);
        }
        if v >= limit {
            break;
        }
        p *= &factor;
    }
    Ok(GeomLadder { values })
}

impl GeomLadder {
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Smallest ladder value `>= d`, if the ladder reaches that far.
    pub fn cover(&self, d: u64) -> Option<u64> {
        let at = self.values.partition_point(|&v| v < d);
        self.values.get(at).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Boundary {
    Lower,
    Upper,
    Left,
    Right,
}

impl Boundary {
    const ALL: [Boundary; 4] = [Boundary::Lower, Boundary::Upper, Boundary::Left, Boundary::Right];

    fn slot(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Boundary::Lower => "lower",
            Boundary::Upper => "upper",
            Boundary::Left => "left",
            Boundary::Right => "right",
        }
    }
}

/// Per-block boundary lists plus their union, in topological order.
#[derive(Debug, Clone)]
pub struct SnapSet {
    k: usize,
    // lists[(j0 * k + i0) * 4 + boundary]: columns for lower/upper, rows for
    // left/right, ascending
    lists: Vec<Vec<u64>>,
    vertices: Vec<Point>,
}

fn offsets_within(start: u64, end: u64, offsets: impl Iterator<Item = u64>, out: &mut Vec<u64>) {
    for d in offsets {
        let Some(v) = start.checked_add(d) else { break };
        if v > end {
            break;
        }
        out.push(v);
    }
}

/// Boundary lists of every block.
///
/// Lower and left boundaries get `first + 1 + d`, upper and right boundaries
/// get `first + d`, for ladder offsets `d`; the lower and left rules also use
/// `d = 0`. Corners sit in all four lists. With these choices every diagonal
/// successor of a point on an upper (right) boundary lands on a listed point
/// of the block above (to the right).
pub fn generate_snap_points<W: Cost>(grid: &BlockGrid<W>, ladder: &GeomLadder) -> SnapSet {
    let (k, l) = (grid.k(), grid.l());
    let x = grid.x();
    let y = grid.y();
    let mut lists = Vec::with_capacity(k * l * 4);
    let mut points = Vec::new();
    let with_zero = || std::iter::once(0).chain(ladder.values().iter().copied());
    for j0 in 0..l {
        let (bt, t) = (y.run_start(j0), y.run_end(j0));
        for i0 in 0..k {
            let (lc, r) = (x.run_start(i0), x.run_end(i0));
            for side in Boundary::ALL {
                let mut v = Vec::new();
                match side {
                    Boundary::Lower | Boundary::Upper => v.extend([lc, r]),
                    Boundary::Left | Boundary::Right => v.extend([bt, t]),
                }
                match side {
                    Boundary::Lower => offsets_within(lc + 1, r, with_zero(), &mut v),
                    Boundary::Left => offsets_within(bt + 1, t, with_zero(), &mut v),
                    Boundary::Upper => offsets_within(lc, r, ladder.values().iter().copied(), &mut v),
                    Boundary::Right => offsets_within(bt, t, ladder.values().iter().copied(), &mut v),
                }
                v.sort_unstable();
                v.dedup();
                match side {
                    Boundary::Lower => points.extend(v.iter().map(|&c| Point::new(c, bt))),
                    Boundary::Upper => points.extend(v.iter().map(|&c| Point::new(c, t))),
                    Boundary::Left => points.extend(v.iter().map(|&r| Point::new(lc, r))),
                    Boundary::Right => points.extend(v.iter().map(|&rw| Point::new(r, rw))),
                }
                lists.push(v);
            }
        }
    }
    points.sort_unstable_by_key(|p| p.topo_key());
    points.dedup();
    SnapSet {
        k,
        lists,
        vertices: points,
    }
}

impl SnapSet {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Position of `p` in topological order.
    pub fn vertex_id(&self, p: Point) -> Option<u32> {
        self.vertices
            .binary_search_by_key(&p.topo_key(), |q| q.topo_key())
            .ok()
            .map(|v| v as u32)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.vertex_id(p).is_some()
    }

    #[inline]
    pub(crate) fn list0(&self, i0: usize, j0: usize, side: Boundary) -> &[u64] {
        &self.lists[(j0 * self.k + i0) * 4 + side.slot()]
    }

    /// Sorted coordinates listed on one boundary of block `b` (one-based).
    pub fn boundary_list(&self, b: Block, side: Boundary) -> &[u64] {
        self.list0(b.i - 1, b.j - 1, side)
    }

    /// First listed point on `side` of the block containing `p`, at or after
    /// `p` (to the right for horizontal boundaries, above for vertical ones).
    pub fn snap_on<W: Cost>(&self, grid: &BlockGrid<W>, p: Point, side: Boundary) -> Result<Point> {
        let b = grid.block_of_point(p.i, p.j)?;
        let (lc, r) = grid.columns(b.i);
        let (bt, t) = grid.rows(b.j);
        let on = match side {
            Boundary::Lower => p.j == bt,
            Boundary::Upper => p.j == t,
            Boundary::Left => p.i == lc,
            Boundary::Right => p.i == r,
        };
        if !on {
            return Err(Error::NotOnBoundary {
                i: p.i,
                j: p.j,
                boundary: side.name(),
            });
        }
        let list = self.boundary_list(b, side);
        let horizontal = matches!(side, Boundary::Lower | Boundary::Upper);
        let coord = if horizontal { p.i } else { p.j };
        let at = list.partition_point(|&v| v < coord);
        // the far corner is always listed
        let v = list[at];
        Ok(if horizontal {
            Point::new(v, p.j)
        } else {
            Point::new(p.i, v)
        })
    }

    /// Snaps a point on a horizontal boundary to the right; the lower
    /// boundary wins when the block is one row tall.
    pub fn snap_h<W: Cost>(&self, grid: &BlockGrid<W>, p: Point) -> Result<Point> {
        let b = grid.block_of_point(p.i, p.j)?;
        let (bt, t) = grid.rows(b.j);
        if p.j == bt {
            self.snap_on(grid, p, Boundary::Lower)
        } else if p.j == t {
            self.snap_on(grid, p, Boundary::Upper)
        } else {
            Err(Error::NotOnBoundary {
                i: p.i,
                j: p.j,
                boundary: "horizontal",
            })
        }
    }

    /// Snaps a point on a vertical boundary upwards; the right boundary wins
    /// when the block is one column wide.
    pub fn snap_v<W: Cost>(&self, grid: &BlockGrid<W>, p: Point) -> Result<Point> {
        let b = grid.block_of_point(p.i, p.j)?;
        let (lc, r) = grid.columns(b.i);
        if p.i == r {
            self.snap_on(grid, p, Boundary::Right)
        } else if p.i == lc {
            self.snap_on(grid, p, Boundary::Left)
        } else {
            Err(Error::NotOnBoundary {
                i: p.i,
                j: p.j,
                boundary: "vertical",
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeKind {
    /// One grid step between block corners.
    CornerStep,
    /// Diagonal step off an upper boundary.
    UpperDiagonal,
    /// Diagonal step off a right boundary.
    RightDiagonal,
    /// Straight walk between neighbours on one boundary list.
    Chain,
    /// Diagonal, horizontal, diagonal, then vertical.
    HtoV,
    /// Diagonal, vertical, diagonal, then horizontal.
    VtoH,
}

impl EdgeKind {
    pub fn label(self) -> &'static str {
        match self {
            EdgeKind::CornerStep => "step1",
            EdgeKind::UpperDiagonal => "step2",
            EdgeKind::RightDiagonal => "step3",
            EdgeKind::Chain => "step4",
            EdgeKind::HtoV => "step5",
            EdgeKind::VtoH => "step6",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge<W> {
    pub from: u32,
    pub to: u32,
    pub weight: W,
    pub kind: EdgeKind,
}

/// A DAG on grid points whose edges all point up and/or right.
#[derive(Debug, Clone)]
pub struct ApproxGraph<W> {
    vertices: Vec<Point>,
    edges: Vec<Edge<W>>,
}

impl<W: Cost> ApproxGraph<W> {
    /// Builds a graph from explicit points and edges, rejecting any edge that
    /// is not monotone or mentions an unknown vertex.
    pub fn from_parts(
        mut vertices: Vec<Point>,
        edges: impl IntoIterator<Item = (Point, Point, W, EdgeKind)>,
    ) -> Result<Self> {
        vertices.sort_unstable_by_key(|p| p.topo_key());
        vertices.dedup();
        let id = |p: Point| {
            vertices
                .binary_search_by_key(&p.topo_key(), |q| q.topo_key())
                .map(|v| v as u32)
                .map_err(|_| Error::PointOutOfRange {
                    i: p.i,
                    j: p.j,
                    m: 0,
                    n: 0,
                })
        };
        let mut out = Vec::new();
        for (a, b, weight, kind) in edges {
            if !a.strictly_precedes(b) {
                return Err(Error::NonMonotoneEdge((a.i, a.j), (b.i, b.j)));
            }
            out.push(Edge {
                from: id(a)?,
                to: id(b)?,
                weight,
                kind,
            });
        }
        Ok(ApproxGraph { vertices, edges: out })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn point(&self, id: u32) -> Point {
        self.vertices[id as usize]
    }

    pub fn vertex_id(&self, p: Point) -> Option<u32> {
        self.vertices
            .binary_search_by_key(&p.topo_key(), |q| q.topo_key())
            .ok()
            .map(|v| v as u32)
    }

    /// Shortest `source -> sink` distance by one sweep in topological order.
    pub fn shortest_path_dag(&self, source: Point, sink: Point) -> Result<W> {
        let (Some(s), Some(t)) = (self.vertex_id(source), self.vertex_id(sink)) else {
            return Err(Error::NoPath);
        };
        let n = self.vertices.len();
        // CSR by source vertex
        let mut start = vec![0u32; n + 1];
        for e in &self.edges {
            start[e.from as usize + 1] += 1;
        }
        for v in 0..n {
            start[v + 1] += start[v];
        }
        let mut fill = start.clone();
        let mut order = vec![0u32; self.edges.len()];
        for (idx, e) in self.edges.iter().enumerate() {
            let slot = &mut fill[e.from as usize];
            order[*slot as usize] = idx as u32;
            *slot += 1;
        }
        let mut dist: Vec<Option<W>> = vec![None; n];
        dist[s as usize] = Some(W::zero());
        for u in s as usize..=t as usize {
            let Some(du) = dist[u].clone() else { continue };
            for &idx in &order[start[u] as usize..start[u + 1] as usize] {
                let e = &self.edges[idx as usize];
                let cand = du.plus(&e.weight);
                let slot = &mut dist[e.to as usize];
                match slot {
                    Some(cur) if *cur <= cand => {}
                    _ => *slot = Some(cand),
                }
            }
        }
        dist[t as usize].take().ok_or(Error::NoPath)
    }
}

/// All edges of the approximation graph.
pub fn build_edges<W: Cost>(grid: &BlockGrid<W>, snaps: &SnapSet, ladder: &GeomLadder) -> Result<ApproxGraph<W>> {
    let (k, l) = (grid.k(), grid.l());
    let (m, n) = (grid.m(), grid.n());
    let x = grid.x();
    let y = grid.y();
    let id = |p: Point| -> Result<u32> {
        snaps
            .vertex_id(p)
            .ok_or(Error::PointOutOfRange { i: p.i, j: p.j, m, n })
    };
    let is_col_edge = |c: u64| {
        let h = x.hat_index(c).expect("column in range");
        h.offset == 1 || h.offset == x.run(h.run).count
    };
    let is_row_edge = |r: u64| {
        let h = y.hat_index(r).expect("row in range");
        h.offset == 1 || h.offset == y.run(h.run).count
    };
    let mut edges: Vec<Edge<W>> = Vec::new();
    let mut push = |from: u32, to: u32, weight: W, kind: EdgeKind| edges.push(Edge { from, to, weight, kind });

    for j0 in 0..l {
        let (bt, t) = (y.run_start(j0), y.run_end(j0));
        for i0 in 0..k {
            let (lc, r) = (x.run_start(i0), x.run_end(i0));
            let c = grid.cost0(i0, j0);
            let lower = snaps.list0(i0, j0, Boundary::Lower);
            let upper = snaps.list0(i0, j0, Boundary::Upper);
            let left = snaps.list0(i0, j0, Boundary::Left);
            let right = snaps.list0(i0, j0, Boundary::Right);

            // step 1: unit steps between corners
            let mut corners = vec![
                Point::new(lc, bt),
                Point::new(r, bt),
                Point::new(lc, t),
                Point::new(r, t),
            ];
            corners.sort_unstable();
            corners.dedup();
            for &q in &corners {
                let from = id(q)?;
                for s in [
                    Point::new(q.i + 1, q.j),
                    Point::new(q.i, q.j + 1),
                    Point::new(q.i + 1, q.j + 1),
                ] {
                    if s.i <= m && s.j <= n && is_col_edge(s.i) && is_row_edge(s.j) {
                        push(from, id(s)?, c.clone(), EdgeKind::CornerStep);
                    }
                }
            }

            // steps 2 and 3: diagonal exits through the upper and right sides
            if t < n {
                for &col in upper {
                    if col < m {
                        push(
                            id(Point::new(col, t))?,
                            id(Point::new(col + 1, t + 1))?,
                            c.clone(),
                            EdgeKind::UpperDiagonal,
                        );
                    }
                }
            }
            if r < m {
                for &row in right {
                    if row < n {
                        push(
                            id(Point::new(r, row))?,
                            id(Point::new(r + 1, row + 1))?,
                            c.clone(),
                            EdgeKind::RightDiagonal,
                        );
                    }
                }
            }

            // step 4: walks between neighbours on each list
            let mut chain = |list: &[u64], at: &dyn Fn(u64) -> Point| -> Result<()> {
                for w in list.windows(2) {
                    push(id(at(w[0]))?, id(at(w[1]))?, c.times(w[1] - w[0]), EdgeKind::Chain);
                }
                Ok(())
            };
            chain(lower, &|v| Point::new(v, bt))?;
            if t != bt || upper != lower {
                chain(upper, &|v| Point::new(v, t))?;
            }
            chain(left, &|v| Point::new(lc, v))?;
            if r != lc || right != left {
                chain(right, &|v| Point::new(r, v))?;
            }

            // step 5: from the lower side, climb cheaper blocks above
            for &p1i in lower {
                let p1 = Point::new(p1i, bt);
                let from = id(p1)?;
                let mut jb = Some(j0);
                while let Some(j1) = jb {
                    let bt1 = y.run_start(j1);
                    let q1i = p1i + (bt1 - bt);
                    if q1i > r {
                        break;
                    }
                    let c1 = grid.cost0(i0, j1);
                    let mut last = None;
                    for d in std::iter::once(0).chain(ladder.values().iter().copied()) {
                        let q2i = q1i.saturating_add(d).min(r);
                        if last == Some(q2i) {
                            continue;
                        }
                        last = Some(q2i);
                        let q3j = bt1 + (r - q2i);
                        if q3j <= n {
                            let j2 = y.run_of(q3j);
                            let right2 = snaps.list0(i0, j2, Boundary::Right);
                            let q4j = right2[right2.partition_point(|&v| v < q3j)];
                            let q4 = Point::new(r, q4j);
                            if q4 != p1 {
                                let w = grid
                                    .mu_v0(i0, j2)
                                    .minus(grid.mu_v0(i0, j0))
                                    .plus(&grid.cost0(i0, j2).times(q4j - y.run_start(j2)))
                                    .plus(&c1.times(q2i - q1i));
                                push(from, id(q4)?, w, EdgeKind::HtoV);
                            }
                        }
                        if q2i == r {
                            break;
                        }
                    }
                    jb = grid.beta_v0(i0, j1);
                }
            }

            // step 6: the mirror image from the left side
            for &p1j in left {
                let p1 = Point::new(lc, p1j);
                let from = id(p1)?;
                let mut ib = Some(i0);
                while let Some(i1) = ib {
                    let lc1 = x.run_start(i1);
                    let q1j = p1j + (lc1 - lc);
                    if q1j > t {
                        break;
                    }
                    let c1 = grid.cost0(i1, j0);
                    let mut last = None;
                    for d in std::iter::once(0).chain(ladder.values().iter().copied()) {
                        let q2j = q1j.saturating_add(d).min(t);
                        if last == Some(q2j) {
                            continue;
                        }
                        last = Some(q2j);
                        let q3i = lc1 + (t - q2j);
                        if q3i <= m {
                            let i2 = x.run_of(q3i);
                            let upper2 = snaps.list0(i2, j0, Boundary::Upper);
                            let q4i = upper2[upper2.partition_point(|&v| v < q3i)];
                            let q4 = Point::new(q4i, t);
                            if q4 != p1 {
                                let w = grid
                                    .mu_h0(i2, j0)
                                    .minus(grid.mu_h0(i0, j0))
                                    .plus(&grid.cost0(i2, j0).times(q4i - x.run_start(i2)))
                                    .plus(&c1.times(q2j - q1j));
                                push(from, id(q4)?, w, EdgeKind::VtoH);
                            }
                        }
                        if q2j == t {
                            break;
                        }
                    }
                    ib = grid.beta_h0(i1, j0);
                }
            }
        }
    }
    Ok(ApproxGraph {
        vertices: snaps.vertices().to_vec(),
        edges,
    })
}

fn in_grid<W: Cost>(grid: &BlockGrid<W>, p: Point) -> Result<()> {
    grid.block_of_point(p.i, p.j).map(|_| ())
}

/// Cost of the route `p1 -D-> q1 -H-> q2 -D-> q3 -V-> q4` (cells before
/// `q4`), where `p1` and `q1` lie on lower block boundaries in one column
/// run, `q3` is on that run's right edge and `q4` is above `q3` in the same
/// block.
pub fn htov_edge_length<W: Cost>(
    grid: &BlockGrid<W>,
    p1: Point,
    q1: Point,
    q2: Point,
    q3: Point,
    q4: Point,
) -> Result<BigRational> {
    for p in [p1, q1, q2, q3, q4] {
        in_grid(grid, p)?;
    }
    let (x, y) = (grid.x(), grid.y());
    let bad = |why: &str| Error::NotHtoVShape(format!("{p1} {q1} {q2} {q3} {q4}: {why}"));
    let i0 = x.run_of(p1.i);
    let r = x.run_end(i0);
    let j0 = y.run_of(p1.j);
    let j1 = y.run_of(q1.j);
    let j2 = y.run_of(q3.j);
    if p1.j != y.run_start(j0) || q1.j != y.run_start(j1) {
        return Err(bad("p1 and q1 must sit on lower block boundaries"));
    }
    if q1.i < p1.i || q1.i - p1.i != q1.j - p1.j || q1.j < p1.j || q1.i > r {
        return Err(bad("p1 to q1 must be a diagonal inside one column run"));
    }
    if q2.j != q1.j || q2.i < q1.i || q2.i > r {
        return Err(bad("q1 to q2 must be horizontal inside the column run"));
    }
    if q3.i != r || q3.j < q2.j || q3.j - q2.j != r - q2.i {
        return Err(bad("q2 to q3 must be a diagonal ending on the right edge"));
    }
    if q4.i != r || q4.j < q3.j || y.run_of(q4.j) != j2 {
        return Err(bad("q3 to q4 must be vertical inside one block"));
    }
    let w = grid
        .mu_v0(i0, j2)
        .minus(grid.mu_v0(i0, j0))
        .plus(&grid.cost0(i0, j2).times(q4.j - y.run_start(j2)))
        .plus(&grid.cost0(i0, j1).times(q2.i - q1.i));
    Ok(grid.to_rational(&w))
}

/// Mirror of [`htov_edge_length`]: `p1 -D-> q1 -V-> q2 -D-> q3 -H-> q4` with
/// `p1`, `q1` on left block boundaries in one row run and `q3` on that run's
/// upper edge.
pub fn vtoh_edge_length<W: Cost>(
    grid: &BlockGrid<W>,
    p1: Point,
    q1: Point,
    q2: Point,
    q3: Point,
    q4: Point,
) -> Result<BigRational> {
    for p in [p1, q1, q2, q3, q4] {
        in_grid(grid, p)?;
    }
    let (x, y) = (grid.x(), grid.y());
    let bad = |why: &str| Error::NotVtoHShape(format!("{p1} {q1} {q2} {q3} {q4}: {why}"));
    let j0 = y.run_of(p1.j);
    let t = y.run_end(j0);
    let i0 = x.run_of(p1.i);
    let i1 = x.run_of(q1.i);
    let i2 = x.run_of(q3.i);
    if p1.i != x.run_start(i0) || q1.i != x.run_start(i1) {
        return Err(bad("p1 and q1 must sit on left block boundaries"));
    }
    if q1.j < p1.j || q1.j - p1.j != q1.i - p1.i || q1.i < p1.i || q1.j > t {
        return Err(bad("p1 to q1 must be a diagonal inside one row run"));
    }
    if q2.i != q1.i || q2.j < q1.j || q2.j > t {
        return Err(bad("q1 to q2 must be vertical inside the row run"));
    }
    if q3.j != t || q3.i < q2.i || q3.i - q2.i != t - q2.j {
        return Err(bad("q2 to q3 must be a diagonal ending on the upper edge"));
    }
    if q4.j != t || q4.i < q3.i || x.run_of(q4.i) != i2 {
        return Err(bad("q3 to q4 must be horizontal inside one block"));
    }
    let w = grid
        .mu_h0(i2, j0)
        .minus(grid.mu_h0(i0, j0))
        .plus(&grid.cost0(i2, j0).times(q4.i - x.run_start(i2)))
        .plus(&grid.cost0(i1, j0).times(q2.j - q1.j));
    Ok(grid.to_rational(&w))
}

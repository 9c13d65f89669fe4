//! The `k x l` block decomposition of the DTW cost table.
//!
//! Block `(i, j)` (one-based in every public signature) is where run `i` of
//! `x` meets run `j` of `y`; all of its cells share one cost. Besides the costs
//! the grid carries the next-strictly-cheaper successor to the right
//! (`beta_h`) and above (`beta_v`) of every block, and the prefix sums
//! `mu_h`/`mu_v` of `run length * block cost` along block rows and columns,
//! which turn the cost of a diagonal-plus-straight path into a constant-time
//! lookup.

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;

use crate::cost::{Cost, CostWidth, ScaledCosts};
use crate::error::{Error, Result};
use crate::metric::{DistanceCache, DistanceFn};
use crate::ratio;
use crate::rle::RleString;

/// One-based block address: `i` indexes runs of `x`, `j` runs of `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Block {
    pub i: usize,
    pub j: usize,
}

impl Block {
    pub fn new(i: usize, j: usize) -> Self {
        Block { i, j }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BetaStats {
    pub beta_star_h: usize,
    pub beta_star_v: usize,
    pub beta_star: usize,
}

/// Rational block costs of an instance, before choosing an integer width.
#[derive(Debug, Clone)]
pub struct BlockCosts {
    k: usize,
    l: usize,
    rational: Vec<BigRational>,
    scaled: ScaledCosts,
}

impl BlockCosts {
    /// Evaluates the `k * l` block costs, one distance call per distinct
    /// letter pair.
    pub fn evaluate(x: &RleString, y: &RleString, d: &DistanceFn) -> Result<Self> {
        let (k, l) = (x.run_count(), y.run_count());
        let mut cache = DistanceCache::new(d);
        let mut rational = Vec::with_capacity(k * l);
        for yr in y.runs() {
            for xr in x.runs() {
                rational.push(cache.get(xr.letter, yr.letter)?);
            }
        }
        let scaled = ScaledCosts::new(&rational);
        Ok(BlockCosts { k, l, rational, scaled })
    }

    pub fn width_for(&self, x: &RleString, y: &RleString) -> CostWidth {
        // any path visits at most m + n - 1 cells
        self.scaled.width_for(u128::from(x.len()) + u128::from(y.len()) + 1)
    }

    pub fn rational(&self, i0: usize, j0: usize) -> &BigRational {
        &self.rational[j0 * self.k + i0]
    }

    pub fn scaled(&self) -> &ScaledCosts {
        &self.scaled
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.k, self.l)
    }
}

/// Block costs, successors and prefix tables for one instance.
///
/// Storage is zero-based and row-major over `y` runs: block `(i0, j0)` lives
/// at `j0 * k + i0`.
#[derive(Debug, Clone)]
pub struct BlockGrid<W> {
    x: RleString,
    y: RleString,
    k: usize,
    l: usize,
    denom: BigUint,
    cost: Vec<W>,
    beta_h: Vec<Option<u32>>,
    beta_v: Vec<Option<u32>>,
    mu_h: Vec<W>,
    mu_v: Vec<W>,
}

/// Builds the grid with arbitrary-precision costs; always succeeds for valid
/// inputs. The engines pick a narrower width when it is safe.
pub fn build_block_grid(x: &RleString, y: &RleString, d: &DistanceFn) -> Result<BlockGrid<BigUint>> {
    let costs = BlockCosts::evaluate(x, y, d)?;
    Ok(BlockGrid::from_costs(x, y, &costs))
}

impl<W: Cost> BlockGrid<W> {
    pub fn from_costs(x: &RleString, y: &RleString, costs: &BlockCosts) -> Self {
        let (k, l) = costs.dims();
        let cost: Vec<W> = costs.scaled.convert();
        let mut grid = BlockGrid {
            x: x.clone(),
            y: y.clone(),
            k,
            l,
            denom: costs.scaled.denom.clone(),
            cost,
            beta_h: Vec::new(),
            beta_v: Vec::new(),
            mu_h: Vec::new(),
            mu_v: Vec::new(),
        };
        grid.compute_beta_h();
        grid.compute_beta_v();
        grid.compute_mu();
        grid
    }

    #[inline]
    pub(crate) fn idx(&self, i0: usize, j0: usize) -> usize {
        j0 * self.k + i0
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> u64 {
        self.x.len()
    }

    pub fn n(&self) -> u64 {
        self.y.len()
    }

    pub fn x(&self) -> &RleString {
        &self.x
    }

    pub fn y(&self) -> &RleString {
        &self.y
    }

    /// Common denominator of every scaled cost in this grid.
    pub fn denom(&self) -> &BigUint {
        &self.denom
    }

    pub fn to_rational(&self, w: &W) -> BigRational {
        ratio::from_biguint_over(w.to_biguint(), &self.denom)
    }

    #[inline]
    pub(crate) fn cost0(&self, i0: usize, j0: usize) -> &W {
        &self.cost[self.idx(i0, j0)]
    }

    #[inline]
    pub(crate) fn mu_h0(&self, i0: usize, j0: usize) -> &W {
        &self.mu_h[self.idx(i0, j0)]
    }

    #[inline]
    pub(crate) fn mu_v0(&self, i0: usize, j0: usize) -> &W {
        &self.mu_v[self.idx(i0, j0)]
    }

    #[inline]
    pub(crate) fn beta_h0(&self, i0: usize, j0: usize) -> Option<usize> {
        self.beta_h[self.idx(i0, j0)].map(|v| v as usize)
    }

    #[inline]
    pub(crate) fn beta_v0(&self, i0: usize, j0: usize) -> Option<usize> {
        self.beta_v[self.idx(i0, j0)].map(|v| v as usize)
    }

    fn check(&self, b: Block) -> (usize, usize) {
        assert!(
            (1..=self.k).contains(&b.i) && (1..=self.l).contains(&b.j),
            "block {b:?} outside {}x{} grid",
            self.k,
            self.l
        );
        (b.i - 1, b.j - 1)
    }

    pub fn block_cost(&self, b: Block) -> BigRational {
        let (i0, j0) = self.check(b);
        self.to_rational(self.cost0(i0, j0))
    }

    /// Least column index `i' > i` whose block in the same row is strictly
    /// cheaper.
    pub fn beta_h(&self, b: Block) -> Option<usize> {
        let (i0, j0) = self.check(b);
        self.beta_h0(i0, j0).map(|v| v + 1)
    }

    /// Least row index `j' > j` whose block in the same column is strictly
    /// cheaper.
    pub fn beta_v(&self, b: Block) -> Option<usize> {
        let (i0, j0) = self.check(b);
        self.beta_v0(i0, j0).map(|v| v + 1)
    }

    /// `sum_{r < i} m_r * cost(r, j)`.
    pub fn mu_h(&self, b: Block) -> BigRational {
        let (i0, j0) = self.check(b);
        self.to_rational(self.mu_h0(i0, j0))
    }

    /// `sum_{s < j} n_s * cost(i, s)`.
    pub fn mu_v(&self, b: Block) -> BigRational {
        let (i0, j0) = self.check(b);
        self.to_rational(self.mu_v0(i0, j0))
    }

    /// Columns `[M_{i-1} + 1, M_i]` spanned by block column `i`.
    pub fn columns(&self, i: usize) -> (u64, u64) {
        (self.x.run_start(i - 1), self.x.run_end(i - 1))
    }

    /// Rows `[N_{j-1} + 1, N_j]` spanned by block row `j`.
    pub fn rows(&self, j: usize) -> (u64, u64) {
        (self.y.run_start(j - 1), self.y.run_end(j - 1))
    }

    pub fn block_of_point(&self, i: u64, j: u64) -> Result<Block> {
        let out = || Error::PointOutOfRange {
            i,
            j,
            m: self.m(),
            n: self.n(),
        };
        let hi = self.x.hat_index(i).map_err(|_| out())?;
        let hj = self.y.hat_index(j).map_err(|_| out())?;
        Ok(Block::new(hi.run + 1, hj.run + 1))
    }

    pub fn compute_beta_h(&mut self) {
        let mut beta = vec![None; self.k * self.l];
        for j0 in 0..self.l {
            let row = &self.cost[j0 * self.k..(j0 + 1) * self.k];
            for (i0, next) in next_strictly_smaller(row).into_iter().enumerate() {
                beta[j0 * self.k + i0] = next.map(|v| v as u32);
            }
        }
        self.beta_h = beta;
    }

    pub fn compute_beta_v(&mut self) {
        let mut beta = vec![None; self.k * self.l];
        let mut column = Vec::with_capacity(self.l);
        for i0 in 0..self.k {
            column.clear();
            column.extend((0..self.l).map(|j0| self.cost[j0 * self.k + i0].clone()));
            for (j0, next) in next_strictly_smaller(&column).into_iter().enumerate() {
                beta[j0 * self.k + i0] = next.map(|v| v as u32);
            }
        }
        self.beta_v = beta;
    }

    fn compute_mu(&mut self) {
        let (k, l) = (self.k, self.l);
        let mut mu_h = Vec::with_capacity(k * l);
        for j0 in 0..l {
            let mut acc = W::zero();
            for i0 in 0..k {
                mu_h.push(acc.clone());
                acc = acc.plus(&self.cost[j0 * k + i0].times(self.x.run(i0).count));
            }
        }
        let mut mu_v = vec![W::zero(); k * l];
        for i0 in 0..k {
            let mut acc = W::zero();
            for j0 in 0..l {
                mu_v[j0 * k + i0] = acc.clone();
                acc = acc.plus(&self.cost[j0 * k + i0].times(self.y.run(j0).count));
            }
        }
        self.mu_h = mu_h;
        self.mu_v = mu_v;
    }

    /// Longest successor chains along rows (`beta_h`) and columns (`beta_v`).
    pub fn beta_stats(&self) -> BetaStats {
        let (k, l) = (self.k, self.l);
        let mut len = vec![0usize; k * l];
        let mut star_h = 0;
        for j0 in 0..l {
            for i0 in (0..k).rev() {
                let at = j0 * k + i0;
                len[at] = 1 + self.beta_h[at].map_or(0, |n| len[j0 * k + n as usize]);
                star_h = star_h.max(len[at]);
            }
        }
        let mut star_v = 0;
        for i0 in 0..k {
            for j0 in (0..l).rev() {
                let at = j0 * k + i0;
                len[at] = 1 + self.beta_v[at].map_or(0, |n| len[n as usize * k + i0]);
                star_v = star_v.max(len[at]);
            }
        }
        BetaStats {
            beta_star_h: star_h,
            beta_star_v: star_v,
            beta_star: star_h.max(star_v),
        }
    }

    /// JSON-friendly snapshot for diagnostics. Rows are block rows `j`,
    /// listed bottom-up.
    pub fn dump(&self) -> GridDump {
        let rows = |f: &dyn Fn(usize, usize) -> String| -> Vec<Vec<String>> {
            (0..self.l)
                .map(|j0| (0..self.k).map(|i0| f(i0, j0)).collect())
                .collect()
        };
        let opt = |v: Option<usize>| v.map(|v| v + 1);
        GridDump {
            k: self.k,
            l: self.l,
            x_prefix: self.x.prefix_sums().to_vec(),
            y_prefix: self.y.prefix_sums().to_vec(),
            block_cost: rows(&|i0, j0| ratio::render(&self.to_rational(self.cost0(i0, j0)))),
            mu_h: rows(&|i0, j0| ratio::render(&self.to_rational(self.mu_h0(i0, j0)))),
            mu_v: rows(&|i0, j0| ratio::render(&self.to_rational(self.mu_v0(i0, j0)))),
            beta_h: (0..self.l)
                .map(|j0| (0..self.k).map(|i0| opt(self.beta_h0(i0, j0))).collect())
                .collect(),
            beta_v: (0..self.l)
                .map(|j0| (0..self.k).map(|i0| opt(self.beta_v0(i0, j0))).collect())
                .collect(),
            beta_stats: self.beta_stats(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridDump {
    pub k: usize,
    pub l: usize,
    pub x_prefix: Vec<u64>,
    pub y_prefix: Vec<u64>,
    pub block_cost: Vec<Vec<String>>,
    pub beta_h: Vec<Vec<Option<usize>>>,
    pub beta_v: Vec<Vec<Option<usize>>>,
    pub mu_h: Vec<Vec<String>>,
    pub mu_v: Vec<Vec<String>>,
    pub beta_stats: BetaStats,
}

/// For each position, the least later index holding a strictly smaller value.
///
/// One left-to-right sweep; the stack holds positions still waiting for a
/// successor, with non-decreasing values from bottom to top.
pub fn next_strictly_smaller<T: Ord>(values: &[T]) -> Vec<Option<usize>> {
    let mut next = vec![None; values.len()];
    let mut pending: Vec<usize> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        while let Some(&top) = pending.last() {
            if values[top] > *v {
                next[top] = Some(i);
                pending.pop();
            } else {
                break;
            }
        }
        pending.push(i);
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::rational;

    fn sample() -> BlockGrid<BigUint> {
        let x = RleString::from_text("aaabbbbddd").unwrap();
        let y = RleString::from_text("aabcdd").unwrap();
        build_block_grid(&x, &y, &DistanceFn::AbsDiff).unwrap()
    }

    #[test]
    fn sample_costs() {
        let g = sample();
        assert_eq!((g.k(), g.l()), (3, 4));
        let row: Vec<_> = (1..=3).map(|i| g.block_cost(Block::new(i, 1))).collect();
        assert_eq!(row, vec![rational(0, 1), rational(1, 1), rational(3, 1)]);
        assert_eq!(g.columns(2), (4, 7));
        assert_eq!(g.rows(3), (4, 4));
    }

    #[test]
    fn single_block() {
        let x = RleString::from_text("a").unwrap();
        let g = build_block_grid(&x, &x, &DistanceFn::AbsDiff).unwrap();
        assert_eq!((g.k(), g.l()), (1, 1));
        assert_eq!(g.block_cost(Block::new(1, 1)), rational(0, 1));
        assert_eq!(g.beta_stats().beta_star, 1);
    }

    #[test]
    fn sample_mu() {
        let g = sample();
        // x-run 'a' against y-runs 'aa', 'b' below the 'c' row
        assert_eq!(g.mu_v(Block::new(1, 3)), rational(1, 1));
        assert_eq!(g.mu_v(Block::new(1, 1)), rational(0, 1));
        // y-run 'c' against x-runs 'aaa', 'bbbb'
        assert_eq!(g.mu_h(Block::new(3, 3)), rational(3 * 2 + 4, 1));
    }

    #[test]
    fn next_smaller_examples() {
        assert_eq!(
            next_strictly_smaller(&[3, 1, 2, 0]),
            vec![Some(1), Some(3), Some(3), None]
        );
        assert_eq!(next_strictly_smaller(&[5, 5, 5]), vec![None, None, None]);
        assert_eq!(next_strictly_smaller(&[3, 2, 1]), vec![Some(1), Some(2), None]);
    }

    #[test]
    fn beta_chain_of_decreasing_row() {
        let x = RleString::from_text("dcba").unwrap();
        let y = RleString::from_text("a").unwrap();
        let g = build_block_grid(&x, &y, &DistanceFn::AbsDiff).unwrap();
        let stats = g.beta_stats();
        assert_eq!(stats.beta_star_h, 4);
        assert_eq!(stats.beta_star_v, 1);
        assert_eq!(g.beta_h(Block::new(1, 1)), Some(2));
        assert_eq!(g.beta_h(Block::new(4, 1)), None);
    }

    #[test]
    fn block_of_point_examples() {
        let g = sample();
        assert_eq!(g.block_of_point(4, 3).unwrap(), Block::new(2, 2));
        assert_eq!(g.block_of_point(1, 1).unwrap(), Block::new(1, 1));
        assert_eq!(g.block_of_point(10, 6).unwrap(), Block::new(3, 4));
        assert!(matches!(g.block_of_point(11, 1), Err(Error::PointOutOfRange { .. })));
        assert!(g.block_of_point(1, 0).is_err());
    }

    #[test]
    fn hamming_beta_star_is_at_most_two() {
        let x = RleString::from_text("abababba").unwrap();
        let y = RleString::from_text("bbabaaab").unwrap();
        let g = build_block_grid(&x, &y, &DistanceFn::Hamming).unwrap();
        assert!(g.beta_stats().beta_star <= 2);
    }
}

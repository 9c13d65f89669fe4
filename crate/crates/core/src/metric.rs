//! Letter distances and the geometric rounding used by the poly-bounded mode.
//!
//! Distances are exact rationals. The base families (Hamming, absolute
//! difference, explicit matrix) only produce nonnegative integers; the rounded
//! family maps every nonzero value up to the next power of `1 + eps1`.
//! Neither symmetry nor the triangle inequality is required.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratio;
use crate::rle::Letter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    Hamming,
    AbsDiff,
    Matrix,
    Rounded,
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceKind::Hamming => "hamming",
            DistanceKind::AbsDiff => "absdiff",
            DistanceKind::Matrix => "matrix",
            DistanceKind::Rounded => "rounded",
        })
    }
}

#[derive(Debug, Clone)]
pub enum DistanceFn {
    /// 0 for equal letters, 1 otherwise.
    Hamming,
    /// `|code(a) - code(b)|`.
    AbsDiff,
    Matrix(MatrixDistance),
    Rounded(Box<RoundedDistanceFn>),
}

impl DistanceFn {
    pub fn kind(&self) -> DistanceKind {
        match self {
            DistanceFn::Hamming => DistanceKind::Hamming,
            DistanceFn::AbsDiff => DistanceKind::AbsDiff,
            DistanceFn::Matrix(_) => DistanceKind::Matrix,
            DistanceFn::Rounded(_) => DistanceKind::Rounded,
        }
    }

    pub fn distance(&self, a: Letter, b: Letter) -> Result<BigRational> {
        match self {
            DistanceFn::Rounded(r) => r.distance(a, b),
            _ => self.integer_distance(a, b).map(ratio::from_u64),
        }
    }

    /// Integer-valued evaluation for the base families. Panics on the rounded
    /// family, whose values need not be integers.
    fn integer_distance(&self, a: Letter, b: Letter) -> Result<u64> {
        match self {
            DistanceFn::Hamming => Ok(u64::from(a != b)),
            DistanceFn::AbsDiff => Ok(u64::from(a.0.abs_diff(b.0))),
            DistanceFn::Matrix(m) => m.get(a, b),
            DistanceFn::Rounded(_) => unreachable!("rounded distances are rational"),
        }
    }

    /// `d^T(a, b) = d(b, a)`.
    pub fn transposed(&self) -> DistanceFn {
        match self {
            DistanceFn::Hamming | DistanceFn::AbsDiff => self.clone(),
            DistanceFn::Matrix(m) => DistanceFn::Matrix(m.transposed()),
            DistanceFn::Rounded(r) => DistanceFn::Rounded(Box::new(RoundedDistanceFn {
                base: r.base.transposed(),
                epsilon1: r.epsilon1.clone(),
                factor: r.factor.clone(),
            })),
        }
    }

    /// True when every value is 0 or 1, the setting where `beta* <= 2`.
    pub fn is_constant_bounded(&self) -> bool {
        match self {
            DistanceFn::Hamming => true,
            DistanceFn::AbsDiff => false,
            DistanceFn::Matrix(m) => m.values.iter().all(|&v| v <= 1),
            DistanceFn::Rounded(r) => r.base.is_constant_bounded(),
        }
    }
}

/// An explicit (possibly asymmetric) integer distance table.
///
/// Row = first argument, column = second argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixDistance {
    letters: Vec<Letter>,
    index: HashMap<Letter, usize>,
    values: Vec<u64>,
}

impl MatrixDistance {
    pub fn new(letters: Vec<Letter>, rows: Vec<Vec<u64>>) -> Result<Self> {
        let size = letters.len();
        if size == 0 {
            return Err(Error::InvalidMatrix("no letters".into()));
        }
        if rows.len() != size {
            return Err(Error::InvalidMatrix(format!(
                "{} rows for {} letters",
                rows.len(),
                size
            )));
        }
        let mut index = HashMap::with_capacity(size);
        for (k, &letter) in letters.iter().enumerate() {
            if index.insert(letter, k).is_some() {
                return Err(Error::InvalidMatrix(format!("duplicate letter {letter}")));
            }
        }
        let mut values = Vec::with_capacity(size * size);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has {} entries, expected {}",
                    r,
                    row.len(),
                    size
                )));
            }
            if row[r] != 0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry for {} is {}, expected 0",
                    letters[r], row[r]
                )));
            }
            values.extend(row);
        }
        Ok(MatrixDistance { letters, index, values })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn get(&self, a: Letter, b: Letter) -> Result<u64> {
        let r = *self.index.get(&a).ok_or(Error::UnknownLetter(a))?;
        let c = *self.index.get(&b).ok_or(Error::UnknownLetter(b))?;
        Ok(self.values[r * self.letters.len() + c])
    }

    pub fn contains(&self, a: Letter) -> bool {
        self.index.contains_key(&a)
    }

    pub fn transposed(&self) -> MatrixDistance {
        let size = self.letters.len();
        let mut values = vec![0; size * size];
        for r in 0..size {
            for c in 0..size {
                values[c * size + r] = self.values[r * size + c];
            }
        }
        MatrixDistance {
            letters: self.letters.clone(),
            index: self.index.clone(),
            values,
        }
    }
}

/// `d_eps1(a, b) = 0` if `d(a, b) = 0`, else `cpow(1 + eps1, d(a, b))`.
#[derive(Debug, Clone)]
pub struct RoundedDistanceFn {
    base: DistanceFn,
    epsilon1: BigRational,
    factor: BigRational,
}

impl RoundedDistanceFn {
    pub fn base(&self) -> &DistanceFn {
        &self.base
    }

    pub fn epsilon1(&self) -> &BigRational {
        &self.epsilon1
    }

    pub fn distance(&self, a: Letter, b: Letter) -> Result<BigRational> {
        let v = self.base.distance(a, b)?;
        if v.is_zero() {
            return Ok(v);
        }
        if v < BigRational::one() {
            return Err(Error::SubUnitDistance {
                a,
                b,
                value: ratio::render(&v),
            });
        }
        cpow(&self.factor, &v)
    }

    pub fn into_distance_fn(self) -> DistanceFn {
        DistanceFn::Rounded(Box::new(self))
    }
}

/// `(1 + eps1)^t` for the least integer `t >= 0` with `v <= (1 + eps1)^t`.
///
/// `base_factor` is `1 + eps1` and must exceed 1.
pub fn cpow(base_factor: &BigRational, v: &BigRational) -> Result<BigRational> {
    let one = BigRational::one();
    if *v < one {
        return Err(Error::BelowUnitDistance(ratio::render(v)));
    }
    if *base_factor <= one {
        return Err(Error::NonPositiveEpsilon(ratio::render(&(base_factor - &one))));
    }
    let mut p = one;
    while p < *v {
        p *= base_factor;
    }
    Ok(p)
}

pub fn round_distance_fn(d: DistanceFn, epsilon1: BigRational) -> Result<RoundedDistanceFn> {
    if !epsilon1.is_positive() {
        return Err(Error::NonPositiveEpsilon(ratio::render(&epsilon1)));
    }
    if let DistanceFn::Matrix(m) = &d {
        // integer entries: nonzero already implies >= 1, nothing else to check
        debug_assert!(m.values.iter().all(|&v| v == 0 || v >= 1));
    }
    let factor = BigRational::one() + &epsilon1;
    Ok(RoundedDistanceFn {
        base: d,
        epsilon1,
        factor,
    })
}

/// Evaluates `d` over a set of letters, caching repeated pairs.
pub(crate) struct DistanceCache<'a> {
    d: &'a DistanceFn,
    memo: HashMap<(Letter, Letter), BigRational>,
}

impl<'a> DistanceCache<'a> {
    pub(crate) fn new(d: &'a DistanceFn) -> Self {
        DistanceCache {
            d,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn get(&mut self, a: Letter, b: Letter) -> Result<BigRational> {
        if let Some(v) = self.memo.get(&(a, b)) {
            return Ok(v.clone());
        }
        let v = self.d.distance(a, b)?;
        if v.is_negative() {
            // base families are unsigned; only a broken custom table could get here
            return Err(Error::InvalidMatrix(format!("negative distance for {a}, {b}")));
        }
        self.memo.insert((a, b), v.clone());
        Ok(v)
    }
}

#[cfg(test)]
pub(crate) fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn l(c: char) -> Letter {
        Letter::from(c)
    }

    #[test]
    fn base_distance_examples() {
        assert_eq!(
            DistanceFn::Hamming.distance(Letter(1), Letter(1)).unwrap(),
            rational(0, 1)
        );
        assert_eq!(
            DistanceFn::Hamming.distance(Letter(0), Letter(1)).unwrap(),
            rational(1, 1)
        );
        assert_eq!(DistanceFn::AbsDiff.distance(l('a'), l('d')).unwrap(), rational(3, 1));
        assert_eq!(DistanceFn::AbsDiff.distance(l('1'), l('0')).unwrap(), rational(1, 1));
    }

    #[test]
    fn matrix_lookup_is_directional() {
        let m = MatrixDistance::new(vec![l('a'), l('b')], vec![vec![0, 3], vec![5, 0]]).unwrap();
        let d = DistanceFn::Matrix(m);
        assert_eq!(d.distance(l('a'), l('b')).unwrap(), rational(3, 1));
        assert_eq!(d.distance(l('b'), l('a')).unwrap(), rational(5, 1));
        let t = d.transposed();
        assert_eq!(t.distance(l('a'), l('b')).unwrap(), rational(5, 1));
        assert_eq!(d.distance(l('a'), l('z')).unwrap_err(), Error::UnknownLetter(l('z')));
    }

    #[test]
    fn matrix_validation() {
        assert!(MatrixDistance::new(vec![l('a')], vec![vec![1]]).is_err());
        assert!(MatrixDistance::new(vec![l('a'), l('b')], vec![vec![0, 1]]).is_err());
        assert!(MatrixDistance::new(vec![l('a'), l('a')], vec![vec![0, 1], vec![1, 0]]).is_err());
    }

    #[test]
    fn cpow_examples() {
        let f = rational(3, 2);
        assert_eq!(cpow(&f, &rational(1, 1)).unwrap(), rational(1, 1));
        assert_eq!(cpow(&f, &rational(3, 1)).unwrap(), rational(27, 8));
        assert_eq!(cpow(&rational(2, 1), &rational(5, 1)).unwrap(), rational(8, 1));
        assert!(matches!(cpow(&f, &rational(1, 2)), Err(Error::BelowUnitDistance(_))));
    }

    #[test]
    fn rounding_examples() {
        let r = round_distance_fn(DistanceFn::AbsDiff, rational(1, 2)).unwrap();
        assert_eq!(r.distance(l('a'), l('a')).unwrap(), rational(0, 1));
        assert_eq!(r.distance(l('a'), l('b')).unwrap(), rational(1, 1));
        let distinct: BTreeSet<_> = (1..=10u32).map(|v| r.distance(Letter(0), Letter(v)).unwrap()).collect();
        // 1, 3/2, 9/4, 27/8, 81/16, 243/32
        assert_eq!(distinct.len(), 6);
    }

    #[test]
    fn rounding_rejects_bad_epsilon() {
        assert!(round_distance_fn(DistanceFn::Hamming, rational(0, 1)).is_err());
        assert!(round_distance_fn(DistanceFn::Hamming, rational(-1, 2)).is_err());
    }

    #[test]
    fn rounding_a_rounded_function_is_allowed() {
        let inner = round_distance_fn(DistanceFn::AbsDiff, rational(1, 2)).unwrap();
        // rounding a rounded function is fine: its nonzero values are >= 1
        let outer = round_distance_fn(inner.into_distance_fn(), rational(1, 10)).unwrap();
        assert!(outer.distance(Letter(0), Letter(3)).is_ok());
    }
}

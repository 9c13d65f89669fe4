//! Exact path-cost arithmetic.
//!
//! Block costs are rationals. Before any dynamic program runs, they are
//! brought over a common denominator and the numerators are stored in the
//! narrowest unsigned integer type that cannot overflow on any path sum
//! (`u64`, `u128`, or an arbitrary-precision `BigUint`).

use std::fmt::Debug;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::ratio;

/// Unsigned exact cost numerators.
pub trait Cost: Clone + Ord + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn from_biguint(v: &BigUint) -> Option<Self>;
    fn to_biguint(&self) -> BigUint;
    fn plus(&self, other: &Self) -> Self;
    /// `self - other`; callers guarantee `other <= self`.
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, k: u64) -> Self;
    fn is_zero_cost(&self) -> bool;
}

impl Cost for u64 {
    #[inline]
    fn zero() -> Self {
        0
    }
    fn from_biguint(v: &BigUint) -> Option<Self> {
        v.to_u64()
    }
    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
    #[inline]
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    #[inline]
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    #[inline]
    fn times(&self, k: u64) -> Self {
        self * k
    }
    #[inline]
    fn is_zero_cost(&self) -> bool {
        *self == 0
    }
}

impl Cost for u128 {
    #[inline]
    fn zero() -> Self {
        0
    }
    fn from_biguint(v: &BigUint) -> Option<Self> {
        v.to_u128()
    }
    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
    #[inline]
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    #[inline]
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    #[inline]
    fn times(&self, k: u64) -> Self {
        self * u128::from(k)
    }
    #[inline]
    fn is_zero_cost(&self) -> bool {
        *self == 0
    }
}

impl Cost for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_biguint(v: &BigUint) -> Option<Self> {
        Some(v.clone())
    }
    fn to_biguint(&self) -> BigUint {
        self.clone()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, k: u64) -> Self {
        self * k
    }
    fn is_zero_cost(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Which integer type carries the scaled costs of one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostWidth {
    U64,
    U128,
    Big,
}

/// A table of nonnegative rationals over one common denominator.
#[derive(Debug, Clone)]
pub struct ScaledCosts {
    pub denom: BigUint,
    pub numers: Vec<BigUint>,
}

impl ScaledCosts {
    pub fn new(values: &[BigRational]) -> Self {
        let denom = values
            .iter()
            .fold(BigUint::one(), |acc, v| acc.lcm(v.denom().magnitude()));
        let numers = values.iter().map(|v| ratio::scaled_numerator(v, &denom)).collect();
        ScaledCosts { denom, numers }
    }

    /// Narrowest width holding any sum of at most `max_terms` entries.
    pub fn width_for(&self, max_terms: u128) -> CostWidth {
        let max = self.numers.iter().max().cloned().unwrap_or_default();
        let bound = max * BigUint::from(max_terms.max(1));
        if bound.bits() < 63 {
            CostWidth::U64
        } else if bound.bits() < 127 {
            CostWidth::U128
        } else {
            CostWidth::Big
        }
    }

    pub fn to_rational(&self, numer: BigUint) -> BigRational {
        ratio::from_biguint_over(numer, &self.denom)
    }

    pub fn convert<W: Cost>(&self) -> Vec<W> {
        self.numers
            .iter()
            .map(|v| W::from_biguint(v).expect("cost width chosen too narrow"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::rational;

    #[test]
    fn common_denominator() {
        let s = ScaledCosts::new(&[rational(1, 2), rational(3, 1), rational(9, 4), rational(0, 1)]);
        assert_eq!(s.denom, BigUint::from(4u32));
        assert_eq!(
            s.numers,
            vec![2u32, 12, 9, 0].into_iter().map(BigUint::from).collect::<Vec<_>>()
        );
        assert_eq!(s.to_rational(BigUint::from(6u32)), rational(3, 2));
    }

    #[test]
    fn width_selection() {
        let s = ScaledCosts::new(&[rational(7, 1)]);
        assert_eq!(s.width_for(1000), CostWidth::U64);
        assert_eq!(s.width_for(1 << 62), CostWidth::U128);
        assert_eq!(s.width_for(u128::MAX / 2), CostWidth::Big);
    }
}

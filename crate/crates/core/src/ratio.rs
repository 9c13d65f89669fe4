//! Exact rational helpers: decimal parsing and canonical rendering.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Parses `"0.25"`, `"3"`, `".5"` or `"1/3"` into an exact rational.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let r = BigRational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// `"p"` for integers, `"p/q"` otherwise (always in lowest terms).
pub fn render(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn from_u64(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn from_biguint_over(numer: BigUint, denom: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom.clone()))
}

/// Nonnegative numerator of `r * denom`, which must be an integer.
pub(crate) fn scaled_numerator(r: &BigRational, denom: &BigUint) -> BigUint {
    debug_assert!(!r.is_negative());
    let scaled = r * BigRational::from_integer(BigInt::from(denom.clone()));
    debug_assert!(scaled.is_integer());
    scaled.to_integer().magnitude().clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_decimal("0.1").unwrap(), q(1, 10));
        assert_eq!(parse_decimal("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_decimal("1").unwrap(), q(1, 1));
        assert_eq!(parse_decimal(".5").unwrap(), q(1, 2));
        assert_eq!(parse_decimal("2/6").unwrap(), q(1, 3));
        assert_eq!(parse_decimal("-1.5").unwrap(), q(-3, 2));
        assert!(parse_decimal("abc").is_none());
        assert!(parse_decimal("1/0").is_none());
        assert!(parse_decimal(".").is_none());
        assert!(parse_decimal("1e-3").is_none());
    }

    #[test]
    fn renders_integers_and_fractions() {
        assert_eq!(render(&q(4, 2)), "2");
        assert_eq!(render(&q(27, 8)), "27/8");
        assert_eq!(render(&q(0, 5)), "0");
    }
}

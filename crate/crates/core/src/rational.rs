//! Exact rational helpers.
//!
//! Every threshold in the pipeline (density, almost divisors, windows, bucket
//! sizes) is compared in exact arithmetic. Logarithms are replaced by dyadic
//! rationals that bracket the true value from above or below.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Number of fractional bits in the dyadic logarithm bounds.
pub const LOG_FRAC_BITS: u32 = 40;

pub fn int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn big(v: u128) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `"7"`, `"-3"`, `"1.25"` or `"10/11"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (whole, fraction) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && fraction.is_empty() {
        return Err(bad());
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !fraction.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{fraction}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let denom = num_traits::pow(BigInt::from(10u32), fraction.len());
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Renders a rational as `p/q`, or as an integer when the denominator is one.
pub fn display(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ceil_u64(r: &Rational) -> Option<u64> {
    if r.is_negative() {
        return Some(0);
    }
    r.ceil().to_integer().to_u64()
}

pub fn floor_u64(r: &Rational) -> Option<u64> {
    if r.is_negative() {
        return Some(0);
    }
    r.floor().to_integer().to_u64()
}

pub fn to_f64(r: &Rational) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // Scale both down to avoid overflow on very large operands.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
        let n = (r.numer() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        n / d
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Round {
    Down,
    Up,
}

/// Dyadic upper bound on `log2(x)`, exact when `x` is a power of two.
pub fn log2_upper(x: u64) -> Rational {
    log2_bound(x, Round::Up)
}

/// Dyadic lower bound on `log2(x)`, exact when `x` is a power of two.
pub fn log2_lower(x: u64) -> Rational {
    log2_bound(x, Round::Down)
}

/// Fixed-point digit extraction: square the mantissa, emit a bit when it
/// reaches 2. Rounding every intermediate mantissa in one direction keeps the
/// result a one-sided bound.
fn log2_bound(x: u64, mode: Round) -> Rational {
    assert!(x >= 1, "log2 of zero");
    const FRAC: u32 = 62;
    let e = 63 - x.leading_zeros();
    let mut y: u128 = if e <= FRAC {
        (x as u128) << (FRAC - e)
    } else {
        let shift = e - FRAC;
        let down = (x as u128) >> shift;
        if mode == Round::Up && (down << shift) != x as u128 {
            down + 1
        } else {
            down
        }
    };
    let one: u128 = 1 << FRAC;
    let mut bits = BigUint::zero();
    for _ in 0..LOG_FRAC_BITS {
        let sq = y * y;
        let (bit, shift) = if sq >= (1u128 << (2 * FRAC + 1)) { (1u32, FRAC + 1) } else { (0, FRAC) };
        bits = (bits << 1usize) + BigUint::from(bit);
        y = match mode {
            Round::Down => sq >> shift,
            Round::Up => (sq + (1u128 << shift) - 1) >> shift,
        };
    }
    let denom = BigUint::one() << LOG_FRAC_BITS as usize;
    if mode == Round::Up && y != one {
        bits += 1u32;
    }
    let fractional = Rational::new(BigInt::from(bits), BigInt::from(denom));
    int(e as u64) + fractional
}

/// `⌈r⌉` as a big integer, for non-negative `r`.
pub fn ceil_big(r: &Rational) -> BigUint {
    let (q, rem) = r.numer().div_rem(r.denom());
    let q = q.to_biguint().unwrap_or_default();
    if rem.is_zero() {
        q
    } else {
        q + 1u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_and_fraction_forms() {
        assert_eq!(parse_rational("1.5").unwrap(), frac(3, 2));
        assert_eq!(parse_rational("10/11").unwrap(), frac(10, 11));
        assert_eq!(parse_rational("64").unwrap(), int(64));
        assert_eq!(parse_rational("-0.25").unwrap(), frac(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), frac(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn log_bounds_exact_on_powers_of_two() {
        for e in 0..64u32 {
            let x = 1u64 << e;
            assert_eq!(log2_upper(x), int(e as u64));
            assert_eq!(log2_lower(x), int(e as u64));
        }
    }

    #[test]
    fn log_bounds_bracket_the_true_value() {
        for &x in &[3u64, 5, 10, 20, 40, 1000, 123_456_789, u64::MAX, (1 << 63) + 1] {
            let lo = log2_lower(x);
            let hi = log2_upper(x);
            assert!(lo < hi, "{x}");
            let width = &hi - &lo;
            assert!(width <= frac(1, 1 << 30), "{x}: loose bracket");
            // 2^lo <= x <= 2^hi, checked through the f64 value with a margin.
            let truth = (x as f64).log2();
            assert!(to_f64(&lo) <= truth + 1e-9);
            assert!(to_f64(&hi) >= truth - 1e-9);
        }
    }

    #[test]
    fn log_bounds_survive_exact_coarse_check() {
        // Coarsen both bounds to 12 fractional bits (outward) and check
        // 2^lo <= x <= 2^hi through x^4096 in exact big-integer arithmetic.
        let q = 1u64 << 12;
        for x in 2u64..300 {
            let lo = (log2_lower(x) * int(q)).floor().to_integer();
            let hi = (log2_upper(x) * int(q)).ceil().to_integer();
            let xq = num_traits::pow(BigUint::from(x), q as usize);
            let two_lo = BigUint::one() << lo.to_usize().unwrap();
            let two_hi = BigUint::one() << hi.to_usize().unwrap();
            assert!(two_lo <= xq && xq <= two_hi, "{x}");
        }
    }

    #[test]
    fn ceil_helpers() {
        assert_eq!(ceil_u64(&frac(21, 20)), Some(2));
        assert_eq!(floor_u64(&frac(21, 20)), Some(1));
        assert_eq!(ceil_u64(&int(5)), Some(5));
        assert_eq!(ceil_big(&frac(7, 2)), BigUint::from(4u32));
        assert_eq!(display(&frac(10, 11)), "10/11");
        assert_eq!(display(&int(3)), "3");
    }
}

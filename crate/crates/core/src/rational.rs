// SPDX-License-Identifier: Apache-2.0

//! Exact rational parsing and formatting.
//!
//! Accepted literals: integers (`15`), fractions (`13331/2`, `-1/3`) and
//! decimals (`0.5`, `6665.50`, `.25`). Decimals are converted exactly, so
//! `"0.5"` is the rational `1/2` and never a binary float.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct ParseRationalError {
    pub literal: String,
    pub reason: &'static str,
}

fn err(literal: &str, reason: &'static str) -> ParseRationalError {
    ParseRationalError {
        literal: literal.to_string(),
        reason,
    }
}

fn parse_digits(digits: &str, literal: &str) -> Result<BigInt, ParseRationalError> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err(literal, "expected decimal digits"));
    }
    digits
        .parse::<BigInt>()
        .map_err(|_| err(literal, "expected decimal digits"))
}

/// Parses `p/q`, an integer, or a decimal string into an exact rational.
pub fn parse_rational(literal: &str) -> Result<BigRational, ParseRationalError> {
    let s = literal.trim();
    if s.is_empty() {
        return Err(err(literal, "empty literal"));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let magnitude = if let Some((num, den)) = body.split_once('/') {
        let num = parse_digits(num.trim(), literal)?;
        let den = parse_digits(den.trim(), literal)?;
        if den.is_zero() {
            return Err(err(literal, "zero denominator"));
        }
        BigRational::new(num, den)
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return Err(err(literal, "expected decimal digits"));
        }
        let int = if int.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(int, literal)?
        };
        let frac_value = if frac.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(frac, literal)?
        };
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        BigRational::new(int * &scale + frac_value, scale)
    } else {
        BigRational::from_integer(parse_digits(body, literal)?)
    };
    Ok(if negative { -magnitude } else { magnitude })
}

/// Canonical text form: `n` for integers, `p/q` in lowest terms otherwise.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Display adapter that prints a rational in canonical form followed by an
/// approximate decimal when it is not an integer (`13331/2 (~6665.5)`).
pub struct Approx<'a>(pub &'a BigRational);

impl fmt::Display for Approx<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{} (~{:.6})", format_rational(self.0), to_f64(self.0))
        }
    }
}

/// Lossy conversion for display only.
pub fn to_f64(value: &BigRational) -> f64 {
    // scale to keep the mantissa meaningful for huge numerators/denominators
    let shift = value.numer().bits().max(value.denom().bits()) as i64 - 60;
    if shift <= 0 {
        let n: f64 = value.numer().to_string().parse().unwrap_or(f64::NAN);
        let d: f64 = value.denom().to_string().parse().unwrap_or(f64::NAN);
        return n / d;
    }
    let n = value.numer() >> (shift as usize);
    let d = value.denom() >> (shift as usize);
    let n: f64 = n.to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = d.to_string().parse().unwrap_or(f64::NAN);
    if d == 0.0 {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        n / d
    }
}

#[cfg(test)]
pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

//! Exact rational numbers used for utilities, weights and ratios.
//!
//! Everything in this crate is computed over arbitrary-precision rationals so
//! that weight ties and ratio comparisons are decided exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{0}` (expected an integer or `p/q` with q != 0)")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`, normalized. Panics when `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn parse(text: &str) -> Result<Rational, ParseRationalError> {
    let trimmed = text.trim();
    let err = || ParseRationalError(text.to_string());
    match trimmed.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => BigInt::from_str(trimmed)
            .map(Rational::from_integer)
            .map_err(|_| err()),
    }
}

/// `p/q` when the denominator is not one, `p` otherwise.
pub fn format(value: &Rational) -> String {
    value.to_string()
}

/// Lossy conversion for display and plotting only.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Closest rational with the given denominator, used to turn slider
/// positions into exact weights.
pub fn from_f64_grid(value: f64, denominator: i64) -> Rational {
    let num = (value * denominator as f64).round() as i64;
    ratio(num, denominator)
}

/// Wire form of a rational: a JSON integer when integral and small,
/// otherwise a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireRational(pub Rational);

impl Serialize for WireRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Some(n) = self.0.numer().to_i64() {
                return serializer.serialize_i64(n);
            }
        }
        serializer.serialize_str(&format(&self.0))
    }
}

impl<'de> Deserialize<'de> for WireRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(n) => Ok(WireRational(int(n))),
            Raw::Text(s) => parse(&s).map(WireRational).map_err(serde::de::Error::custom),
        }
    }
}

/// Serialize a rational as a `"p/q"` string unconditionally.
pub fn serialize_as_string<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&format(value))
}

pub fn is_positive(value: &Rational) -> bool {
    value.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse(" 1 / 3 ").unwrap(), ratio(1, 3));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn wire_form_round_trips() {
        let values = [int(-7), ratio(5, 3), ratio(-1, 2), int(0)];
        for v in values {
            let text = serde_json::to_string(&WireRational(v.clone())).unwrap();
            let back: WireRational = serde_json::from_str(&text).unwrap();
            assert_eq!(back.0, v);
        }
        assert_eq!(serde_json::to_string(&WireRational(int(4))).unwrap(), "4");
        assert_eq!(serde_json::to_string(&WireRational(ratio(1, 2))).unwrap(), "\"1/2\"");
    }

    #[test]
    fn grid_rounding() {
        assert_eq!(from_f64_grid(0.25, 1000), ratio(1, 4));
        assert_eq!(from_f64_grid(0.3334, 1000), ratio(333, 1000));
    }
}

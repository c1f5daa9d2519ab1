//! Exact rational arithmetic helpers.
//!
//! All model and oracle arithmetic uses [`Rat`] so that inequalities such as
//! the knapsack-relaxation bound can be asserted exactly. Floating point is
//! confined to the bound analysis and to summary statistics.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt::Write as _;
use thiserror::Error;

/// Arbitrary-precision rational number.
pub type Rat = num_rational::BigRational;

/// Errors raised when parsing a rational from text or JSON.
#[derive(Debug, Error, PartialEq)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("non-finite float {0} cannot be represented")]
    NonFinite(f64),
}

/// Builds a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Builds a rational from an unsigned integer.
pub fn rat_u64(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Builds a rational from a usize.
pub fn rat_usize(n: usize) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Converts a rational to the nearest f64 for reporting.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses a rational from text.
///
/// Accepted forms: integers (`"7"`, `"-3"`), fractions (`"43/2000"`), and
/// decimal literals (`"0.0215"`, `"-1.5"`). Decimals are converted exactly.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRatError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| ParseRatError::Invalid(s.to_string()))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| ParseRatError::Invalid(s.to_string()))?;
        if den.is_zero() {
            return Err(ParseRatError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rat::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRatError::Invalid(s.to_string()));
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.strip_prefix(['-', '+']).unwrap_or(int_part);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) || int_digits.is_empty() {
            return Err(ParseRatError::Invalid(s.to_string()));
        }
        let mut digits = String::with_capacity(int_digits.len() + frac_part.len());
        digits.push_str(int_digits);
        digits.push_str(frac_part);
        let num: BigInt = digits
            .parse()
            .map_err(|_| ParseRatError::Invalid(s.to_string()))?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        let r = Rat::new(num, den);
        return Ok(if negative { -r } else { r });
    }
    let num: BigInt = s
        .parse()
        .map_err(|_| ParseRatError::Invalid(s.to_string()))?;
    Ok(Rat::from_integer(num))
}

/// Converts an f64 to the exact rational of its shortest decimal rendering.
///
/// The shortest round-trip representation is what a human wrote in a config
/// file, so `0.0215` becomes `43/2000` rather than the binary fraction the
/// float actually stores.
pub fn rat_from_f64(x: f64) -> Result<Rat, ParseRatError> {
    if !x.is_finite() {
        return Err(ParseRatError::NonFinite(x));
    }
    let mut text = String::new();
    write!(text, "{x}").expect("formatting f64 cannot fail");
    if text.contains(['e', 'E']) {
        // Exponential renderings only occur for extreme magnitudes that do
        // not appear in experiment parameters; convert via the exact binary
        // value instead.
        return Rat::from_float(x).ok_or(ParseRatError::NonFinite(x));
    }
    parse_rat(&text)
}

/// Renders a rational as `"p"` for integers and `"p/q"` otherwise.
pub fn rat_display(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapters representing a rational as a JSON number when it is an
/// integer in range and as a `"p/q"` string otherwise.
pub mod rat_serde {
    use super::*;
    use serde::de::{self, Deserializer, Visitor};
    use serde::ser::Serializer;

    pub fn serialize<S: Serializer>(value: &Rat, serializer: S) -> Result<S::Ok, S::Error> {
        if value.is_integer() {
            if let Some(n) = value.numer().to_u64() {
                return serializer.serialize_u64(n);
            }
            if let Some(n) = value.numer().to_i64() {
                return serializer.serialize_i64(n);
            }
        }
        serializer.serialize_str(&rat_display(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rat, D::Error> {
        struct RatVisitor;

        impl<'de> Visitor<'de> for RatVisitor {
            type Value = Rat;

            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("an integer, a decimal number, or a \"p/q\" string")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
                Ok(rat_u64(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
                Ok(Rat::from_integer(BigInt::from(v)))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rat, E> {
                rat_from_f64(v).map_err(de::Error::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
                parse_rat(v).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_any(RatVisitor)
    }
}

/// Parses a rational from a JSON value (number or string).
pub fn rat_from_json(value: &serde_json::Value) -> Result<Rat, ParseRatError> {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(v) = n.as_u64() {
                Ok(rat_u64(v))
            } else if let Some(v) = n.as_i64() {
                Ok(Rat::from_integer(BigInt::from(v)))
            } else if let Some(v) = n.as_f64() {
                rat_from_f64(v)
            } else {
                Err(ParseRatError::Invalid(n.to_string()))
            }
        }
        serde_json::Value::String(s) => parse_rat(s),
        other => Err(ParseRatError::Invalid(other.to_string())),
    }
}

/// True when `r` is a non-negative integer that fits in u64.
pub fn rat_as_u64(r: &Rat) -> Option<u64> {
    if r.is_integer() && !r.is_negative() {
        r.numer().to_u64()
    } else {
        None
    }
}

//! Exact rational arithmetic used for every cost and deviation coefficient.
//!
//! Values are `Ratio<i128>`. On disk they are written as decimal strings
//! (`"12.5"`) whenever the denominator divides a power of ten, and as
//! `"n/d"` otherwise, so that every value round-trips bit-exactly.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = Ratio<i128>;

/// Largest power of ten tried when rendering a decimal string.
const MAX_DECIMALS: u32 = 18;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct ParseRationalError {
    pub literal: String,
    pub reason: &'static str,
}

pub fn int(v: i128) -> Rational {
    Rational::from_integer(v)
}

pub fn ratio(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

/// Parses `"12"`, `"-0.25"`, `"1e3"`-free decimals, or `"n/d"`.
pub fn parse_rational(literal: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        literal: literal.to_string(),
        reason,
    };
    let s = literal.trim();
    if s.is_empty() {
        return Err(err("empty"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| err("bad numerator"))?;
        let d: i128 = d.trim().parse().map_err(|_| err("bad denominator"))?;
        if d == 0 {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err("no digits"));
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(err("not a decimal number"));
    }
    if frac.len() > MAX_DECIMALS as usize {
        return Err(err("too many decimal places"));
    }
    let digits = format!("{whole}{frac}");
    let numer: i128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| err("out of range"))?
    };
    let denom = 10i128.pow(frac.len() as u32);
    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Canonical text form: shortest decimal if exact, else `n/d`.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        return value.numer().to_string();
    }
    let denom = *value.denom();
    let mut scale: i128 = 1;
    for places in 1..=MAX_DECIMALS {
        scale *= 10;
        if scale % denom == 0 {
            let scaled = value.numer() * (scale / denom);
            let sign = if scaled < 0 { "-" } else { "" };
            let abs = scaled.abs();
            let whole = abs / scale;
            let frac = abs % scale;
            let frac = format!("{:0width$}", frac, width = places as usize);
            return format!("{sign}{whole}.{}", frac.trim_end_matches('0'));
        }
    }
    format!("{}/{}", value.numer(), value.denom())
}

/// `floor(value + 1/2)`; halves go up.
pub fn round_half_up(value: &Rational) -> i128 {
    (value + Rational::new(1, 2)).floor().to_integer()
}

pub fn ceil(value: &Rational) -> i128 {
    value.ceil().to_integer()
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Rounds a float onto the `1/grid` lattice. Used to turn Gaussian draws into
/// exact rationals.
pub fn quantize(value: f64, grid: i128) -> Rational {
    Rational::new((value * grid as f64).round() as i128, grid)
}

pub fn clamp(value: Rational, lo: &Rational, hi: &Rational) -> Rational {
    if value < *lo {
        *lo
    } else if value > *hi {
        *hi
    } else {
        value
    }
}

pub fn is_nonnegative(value: &Rational) -> bool {
    !value.is_negative()
}

/// Least common multiple of the denominators, so `v * lcm` is integral for all `v`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i128 {
    values
        .into_iter()
        .fold(1i128, |acc, v| acc.lcm(v.denom()))
        .max(1)
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

pub fn one() -> Rational {
    Rational::one()
}

/// Display adaptor producing the canonical text form.
pub struct Display<'a>(pub &'a Rational);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}

/// `#[serde(with = "crate::num::serde_rational")]`
pub mod serde_rational {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }
}

/// `#[serde(with = "crate::num::serde_rational_vec")]`
pub mod serde_rational_vec {
    use super::*;
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&format_rational(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(D::Error::custom))
            .collect()
    }
}

/// `#[serde(with = "crate::num::serde_rational_opt")]`
pub mod serde_rational_opt {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_some(&format_rational(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse_rational(&t).map_err(D::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_decimal_and_fraction_literals() {
        assert_eq!(parse_rational("10").unwrap(), int(10));
        assert_eq!(parse_rational("12.5").unwrap(), ratio(25, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("4/6").unwrap(), ratio(2, 3));
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&int(300)), "300");
        assert_eq!(format_rational(&ratio(3, 2)), "1.5");
        assert_eq!(format_rational(&ratio(-1, 8)), "-0.125");
        assert_eq!(format_rational(&ratio(1, 3)), "1/3");
        assert_eq!(format_rational(&ratio(7, 20)), "0.35");
    }

    #[test]
    fn rounding_rules() {
        assert_eq!(round_half_up(&ratio(5, 2)), 3);
        assert_eq!(round_half_up(&ratio(7, 3)), 2);
        assert_eq!(round_half_up(&int(0)), 0);
        assert_eq!(ceil(&ratio(3, 2)), 2);
        assert_eq!(ceil(&int(4)), 4);
    }

    proptest! {
        #[test]
        fn text_form_round_trips(n in -1_000_000i128..1_000_000, d in 1i128..10_000) {
            let v = ratio(n, d);
            prop_assert_eq!(parse_rational(&format_rational(&v)).unwrap(), v);
        }
    }
}

//! Exact rational helpers shared across modules: parsing, formatting,
//! serde glue, and float conversion at the evaluation boundary.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;

pub type Rat = BigRational;

/// Build a rational from an integer pair, `rat(p, q)` = p/q.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Build a rational from an integer.
pub fn rint(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Parse "p/q", "p", or a decimal like "1.25" into an exact rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).ok()?;
        let d = BigInt::from_str(den.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let digits = frac_part.len() as u32;
        if digits == 0 || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.trim_start().starts_with('-');
        let i = BigInt::from_str(if int_part.is_empty() { "0" } else { int_part }).ok()?;
        let f = BigInt::from_str(frac_part).ok()?;
        let scale = BigInt::from(10u32).pow(digits);
        let mag = i.abs() * &scale + f;
        let signed = if negative { -mag } else { mag };
        return Some(Rat::new(signed, scale));
    }
    BigInt::from_str(s).ok().map(Rat::from_integer)
}

/// Render as "p/q", or "p" for integers.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter: rationals travel as "p/q" strings, plain integers, or
/// decimal strings in JSON.
pub mod rat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(r))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum RatRepr {
        Int(i64),
        Str(String),
        Float(f64),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        match RatRepr::deserialize(d)? {
            RatRepr::Int(i) => Ok(rint(i)),
            RatRepr::Str(s) => parse_rat(&s)
                .ok_or_else(|| serde::de::Error::custom(format!("bad rational: {s:?}"))),
            RatRepr::Float(f) => {
                // accept only floats that are exactly representable as
                // small decimals (config convenience, e.g. 2.5)
                let s = format!("{f}");
                parse_rat(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational: {f}")))
            }
        }
    }
}

/// A rational field wrapper for types that are entirely "p/q" maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatStr(#[serde(with = "rat_serde")] pub Rat);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rat("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rat("-7/4").unwrap(), rat(-7, 4));
        assert_eq!(parse_rat("16").unwrap(), rint(16));
        assert_eq!(parse_rat("1.25").unwrap(), rat(5, 4));
        assert_eq!(parse_rat("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat("2.50").unwrap(), rat(5, 2));
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("abc").is_none());
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(rat_to_string(&rat(38065, 55296)), "38065/55296");
        assert_eq!(rat_to_string(&rat(4, 2)), "2");
        assert_eq!(rat_to_string(&rat(-3, 9)), "-1/3");
    }

    #[test]
    fn roundtrips_through_json() {
        let v = RatStr(rat(95, 768));
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "\"95/768\"");
        let back: RatStr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let from_int: RatStr = serde_json::from_str("12").unwrap();
        assert_eq!(from_int.0, rint(12));
    }
}

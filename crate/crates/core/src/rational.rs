//! Exact rational helpers: construction shorthands, canonical `"p/q"` text
//! form, and serde adapters used by every report type.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `p/q` as an exact rational. Panics on `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    BigRational::from_integer(BigInt::from(p))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Canonical text form: reduced, positive denominator, always with a `/`.
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Strict parser: accepts only the canonical form produced by [`format`].
pub fn parse_canonical(s: &str) -> Result<Rational> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("`{s}` is not of the form p/q")))?;
    if !is_integer_literal(p, true) || !is_integer_literal(q, false) {
        return Err(Error::Parse(format!("`{s}` is not a canonical rational")));
    }
    let p = BigInt::from_str(p).map_err(|e| Error::Parse(e.to_string()))?;
    let q = BigInt::from_str(q).map_err(|e| Error::Parse(e.to_string()))?;
    if q.is_zero() {
        return Err(Error::Parse(format!("`{s}` has zero denominator")));
    }
    let r = BigRational::new(p.clone(), q.clone());
    if r.numer() != &p || r.denom() != &q {
        return Err(Error::Parse(format!("`{s}` is not in lowest terms")));
    }
    Ok(r)
}

/// Lenient parser: integers, `p/q` (any reduction), or finite decimals, all
/// read exactly.
pub fn parse_lenient(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("`{s}` has zero denominator")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("`{s}` is not a decimal literal")));
        }
        let mut numer = BigInt::from_str(&digits).map_err(|e| Error::Parse(e.to_string()))?;
        if negative {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(numer, denom));
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|_| Error::Parse(format!("`{s}` is not a rational number")))
}

fn is_integer_literal(s: &str, signed: bool) -> bool {
    let digits = if signed { s.strip_prefix('-').unwrap_or(s) } else { s };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return false;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return false;
    }
    // "-0/1" is not canonical
    !(signed && s.starts_with('-') && digits == "0")
}

pub fn min<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Dot product of two equally sized slices.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Serde adapter: a rational as its canonical string.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_canonical(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| parse_canonical(s).map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&format(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
            let v = Option::<String>::deserialize(d)?;
            v.map(|s| parse_canonical(&s).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}

/// A value that is either a finite rational or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extended {
    Finite(Rational),
    Infinite,
}

impl Extended {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(r) => Some(r),
            Extended::Infinite => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }
}

impl serde::Serialize for Extended {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(r) => s.serialize_str(&format(r)),
            Extended::Infinite => s.serialize_str("+inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        for r in [rat(3, 4), rat(-7, 2), int(0), int(5), rat(1, 3)] {
            assert_eq!(parse_canonical(&format(&r)).unwrap(), r);
        }
    }

    #[test]
    fn rejects_non_canonical() {
        for s in ["2/4", "1", "0.5", "1/-2", "+1/2", "01/2", "1/0", "-0/1", "a/b", "1/2/3", ""] {
            assert!(parse_canonical(s).is_err(), "accepted {s}");
        }
    }

    #[test]
    fn lenient_reads_exactly() {
        assert_eq!(parse_lenient("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_lenient("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_lenient("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_lenient("-3").unwrap(), int(-3));
        assert!(parse_lenient("1e3").is_err());
    }
}

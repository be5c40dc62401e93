//! Exact rational scalars.
//!
//! Every entry in the system is a [`Rational`], an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator. The textual
//! form is `"p/q"`, or `"p"` when the denominator is one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"` or `"p"`; non-reduced input is normalized.
pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

pub fn to_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Total order used to pick a canonical representative of `{a, -a}`.
pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}

/// JSON accepts strings or integer literals for a rational.
#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum RatRepr {
    Str(String),
    Int(i64),
}

impl RatRepr {
    pub(crate) fn into_rational(self) -> Result<Rational> {
        match self {
            RatRepr::Str(s) => parse(&s),
            RatRepr::Int(v) => Ok(int(v)),
        }
    }
}

/// `#[serde(with = "rational::serde_str")]` for single rational fields.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        RatRepr::deserialize(d)?
            .into_rational()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_normalizes() {
        assert_eq!(parse("4/6").unwrap(), frac(2, 3));
        assert_eq!(parse("1/-2").unwrap(), frac(-1, 2));
        assert_eq!(parse(" -7 ").unwrap(), int(-7));
        assert_eq!(parse("0/5").unwrap(), zero());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(to_string(&frac(-2, 3)), "-2/3");
        assert_eq!(to_string(&int(5)), "5");
        assert_eq!(to_string(&frac(0, 7)), "0");
        let z = parse("0/9").unwrap();
        assert_eq!(z.denom(), &BigInt::from(1));
    }
}

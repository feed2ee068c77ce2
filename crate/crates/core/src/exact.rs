//! Exact rational helpers and certified bounds on `e` and `sqrt(e)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"a/b"` or a plain integer `"a"`. Decimal notation is rejected.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: input.to_string(),
        reason,
    };
    let s = input.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    if num.contains('.') || den.contains('.') {
        return Err(err("decimal notation is not accepted, use a/b"));
    }
    let n: BigInt = num
        .parse()
        .map_err(|_| err("numerator is not an integer"))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| err("denominator is not an integer"))?;
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Like [`parse_rational`] but also reads finite decimal literals such as
/// `"0.1"` as the exact rational they denote (`1/10`).
pub fn parse_decimal(input: &str) -> Result<Rational, ParseRationalError> {
    let s = input.trim();
    if s.contains('/') || !s.contains('.') {
        return parse_rational(s);
    }
    let err = |reason| ParseRationalError {
        input: input.to_string(),
        reason,
    };
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body
        .split_once('.')
        .ok_or_else(|| err("malformed decimal"))?;
    if frac.is_empty() && whole.is_empty() {
        return Err(err("malformed decimal"));
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(err("malformed decimal"));
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| err("malformed decimal"))?
    };
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rational::new(numer, denom);
    Ok(if neg { -value } else { value })
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn pow(base: &Rational, exp: usize) -> Rational {
    num_traits::pow(base.clone(), exp)
}

/// `2^k` as an exact rational; negative `k` gives `2^-|k|`.
pub fn pow2(k: i64) -> Rational {
    let big = num_traits::pow(BigInt::from(2), k.unsigned_abs() as usize);
    if k >= 0 {
        Rational::from_integer(big)
    } else {
        Rational::new(BigInt::one(), big)
    }
}

pub fn is_nonneg(value: &Rational) -> bool {
    !value.is_negative()
}

/// Lower and upper rational bounds on Euler's number, 21 decimal digits.
pub fn e_bounds() -> (Rational, Rational) {
    decimal_bracket("2718281828459045235360", 21)
}

/// Lower and upper rational bounds on `sqrt(e)`, 22 decimal digits.
pub fn sqrt_e_bounds() -> (Rational, Rational) {
    decimal_bracket("16487212707001281468486", 22)
}

fn decimal_bracket(truncated: &str, scale: usize) -> (Rational, Rational) {
    let lo: BigInt = truncated.parse().expect("constant digits");
    let den = num_traits::pow(BigInt::from(10), scale);
    let hi = &lo + BigInt::one();
    (Rational::new(lo, den.clone()), Rational::new(hi, den))
}

/// Display wrapper printing `a/b`, or `a` for integers.
pub struct Exact<'a>(pub &'a Rational);

impl fmt::Display for Exact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Serde adapters that encode rationals as `"a/b"` strings.
pub mod as_string {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::Rational;
        use serde::ser::SerializeSeq;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(values.len()))?;
            for v in values {
                seq.serialize_element(&v.to_string())?;
            }
            seq.end()
        }
    }

    pub mod option {
        use super::Rational;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match value {
                Some(v) => s.serialize_str(&v.to_string()),
                None => s.serialize_str("undefined"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(" 1 ").unwrap(), int(1));
        assert_eq!(parse_rational("0").unwrap(), int(0));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_decimal("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_decimal("2").unwrap(), int(2));
        assert_eq!(parse_decimal("-1.25").unwrap(), ratio(-5, 4));
        assert_eq!(parse_decimal("1/3").unwrap(), ratio(1, 3));
        assert!(parse_decimal("1.2.3").is_err());
    }

    #[test]
    fn constant_brackets_contain_the_float_values() {
        let (lo, hi) = e_bounds();
        assert!(to_f64(&lo) <= std::f64::consts::E && std::f64::consts::E <= to_f64(&hi));
        let (lo, hi) = sqrt_e_bounds();
        let s = std::f64::consts::E.sqrt();
        assert!(to_f64(&lo) <= s + 1e-15 && s - 1e-15 <= to_f64(&hi));
        // (sqrt e)^2 bracket must sit inside the e bracket's neighbourhood.
        let (elo, ehi) = e_bounds();
        assert!(&lo * &lo < ehi && &hi * &hi > elo);
    }

    #[test]
    fn pow2_handles_negative_exponents() {
        assert_eq!(pow2(-3), ratio(1, 8));
        assert_eq!(pow2(4), int(16));
    }
}

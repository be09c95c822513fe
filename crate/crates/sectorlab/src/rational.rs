//! Exact rational helpers shared by the exact-arithmetic modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n/d` as a big rational. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.2509"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Format(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Format(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty()
        || !whole.chars().all(|c| c.is_ascii_digit())
        || !frac.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("{whole}{frac}0").parse().map_err(|_| bad())?;
    let scale = BigInt::from(10u32).pow(frac.len() as u32 + 1);
    let r = Rational::new(digits, scale);
    Ok(if neg { -r } else { r })
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// The exact value of a finite double.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("non-finite value {x}")))
}

pub fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

pub fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

/// Serializes a rational as the string `"p/q"` (or `"p"` when integral).
pub fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn serialize_factor_list<S: serde::Serializer>(
    list: &[(u64, Rational)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(list.len()))?;
    for (p, f) in list {
        seq.serialize_element(&(p, f.to_string()))?;
    }
    seq.end()
}

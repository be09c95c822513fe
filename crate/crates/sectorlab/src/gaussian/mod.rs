//! Gaussian integers, canonical associates, primes and weighted point sets.

pub(crate) mod angle;
mod cache;
mod primes;
mod weights;

pub use angle::{angular_separation_leq, separation_test, AngleSpec, Separation, SinSqBracket};
pub use cache::{read_prime_cache, write_prime_cache, PrimeCache};
pub use primes::{
    gaussian_prime_count, gaussian_primes_by_norm, split_rational_prime, sqrt_minus_one_mod_prime, tau_gaussian,
    PrimeClassification, PrimeKind, MAX_SIEVE_NORM,
};
pub use weights::{
    almost_prime_weights, rough_weights, AlmostPrimeConfig, AlmostPrimeSet, RoughNumberFilter, WeightedPoint,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element `re + im·i` of ℤ[i].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

/// The associate of an element lying in the first quadrant, together with the
/// rotation that produced it: `value = i^unit_exponent · original`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalElement {
    pub value: GaussianInt,
    pub unit_exponent: u8,
}

impl GaussianInt {
    pub const ZERO: GaussianInt = GaussianInt { re: 0, im: 0 };
    pub const ONE: GaussianInt = GaussianInt { re: 1, im: 0 };
    pub const I: GaussianInt = GaussianInt { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        GaussianInt { re, im }
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    /// `re² + im²`. Cannot overflow: the widened sum is below 2^127.
    pub fn norm(self) -> u128 {
        let a = self.re.unsigned_abs() as u128;
        let b = self.im.unsigned_abs() as u128;
        a * a + b * b
    }

    /// The norm as a `u64`, or an overflow error.
    pub fn norm_u64(self) -> Result<u64> {
        u64::try_from(self.norm()).map_err(|_| Error::Overflow(format!("norm of {self} exceeds 64 bits")))
    }

    pub fn conj(self) -> Self {
        GaussianInt::new(self.re, -self.im)
    }

    /// Multiplication by `i`.
    pub fn mul_i(self) -> Self {
        GaussianInt::new(-self.im, self.re)
    }

    /// The product with 128-bit intermediates, `None` if a component leaves `i64`.
    pub fn checked_mul(self, other: Self) -> Option<Self> {
        let (re, im) = wide_mul(self, other);
        Some(GaussianInt::new(i64::try_from(re).ok()?, i64::try_from(im).ok()?))
    }

    pub fn checked_add(self, other: Self) -> Option<Self> {
        Some(GaussianInt::new(self.re.checked_add(other.re)?, self.im.checked_add(other.im)?))
    }

    pub fn checked_sub(self, other: Self) -> Option<Self> {
        Some(GaussianInt::new(self.re.checked_sub(other.re)?, self.im.checked_sub(other.im)?))
    }

    /// `self / d` when `d` divides `self` exactly.
    pub fn div_exact(self, d: Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let n = d.norm() as i128;
        let (re, im) = wide_mul(self, d.conj());
        if re % n != 0 || im % n != 0 {
            return None;
        }
        Some(GaussianInt::new(i64::try_from(re / n).ok()?, i64::try_from(im / n).ok()?))
    }

    /// Nearest-integer quotient and the remainder, with `N(rem) < N(d)`.
    pub fn div_rem(self, d: Self) -> Option<(Self, Self)> {
        if d.is_zero() {
            return None;
        }
        let n = d.norm() as i128;
        let (re, im) = wide_mul(self, d.conj());
        let q = GaussianInt::new(i64::try_from(round_div(re, n)).ok()?, i64::try_from(round_div(im, n)).ok()?);
        let r = self.checked_sub(q.checked_mul(d)?)?;
        Some((q, r))
    }

    /// Complex argument in `(-π, π]`.
    pub fn arg(self) -> f64 {
        (self.im as f64).atan2(self.re as f64)
    }
}

fn wide_mul(a: GaussianInt, b: GaussianInt) -> (i128, i128) {
    let (ar, ai, br, bi) = (a.re as i128, a.im as i128, b.re as i128, b.im as i128);
    (ar * br - ai * bi, ar * bi + ai * br)
}

fn round_div(a: i128, n: i128) -> i128 {
    (2 * a + n).div_euclid(2 * n)
}

/// Greatest common divisor, returned as its canonical associate (`0` if both are zero).
pub fn gaussian_gcd(a: GaussianInt, b: GaussianInt) -> GaussianInt {
    let (mut x, mut y) = (a, b);
    while !y.is_zero() {
        let (_, r) = x.div_rem(y).expect("remainder shrinks the norm");
        x = y;
        y = r;
    }
    if x.is_zero() {
        x
    } else {
        canonicalize(x).expect("nonzero").value
    }
}

/// Rotates `z` into the first quadrant `re > 0, im ≥ 0`.
pub fn canonicalize(z: GaussianInt) -> Result<CanonicalElement> {
    if z.is_zero() {
        return Err(Error::ZeroInput);
    }
    // i^e·z for e = 0..3: (re, im), (-im, re), (-re, -im), (im, -re)
    let (re, im) = (z.re as i128, z.im as i128);
    let rotations = [(re, im), (-im, re), (-re, -im), (im, -re)];
    let e = rotations.iter().position(|&(a, b)| a > 0 && b >= 0).expect("one rotation lands in the quadrant");
    let (a, b) = rotations[e];
    let value = match (i64::try_from(a), i64::try_from(b)) {
        (Ok(a), Ok(b)) => GaussianInt::new(a, b),
        _ => return Err(Error::Overflow(format!("rotating {z} leaves the i64 range"))),
    };
    Ok(CanonicalElement { value, unit_exponent: e as u8 })
}

pub fn norm(z: GaussianInt) -> u128 {
    z.norm()
}

/// The argument of the canonical associate, in `[0, π/2)`.
pub fn arg_mod_quarter(z: GaussianInt) -> Result<f64> {
    let c = canonicalize(z)?.value;
    let a = (c.im as f64).atan2(c.re as f64);
    // atan2 of a first-quadrant point is in [0, π/2]; π/2 itself needs re = 0
    Ok(a.min(f64::from_bits(std::f64::consts::FRAC_PI_2.to_bits() - 1)))
}

/// True when `z` is in ℤ[i]*: `re > 0` and `im ≥ 0`.
pub fn is_canonical(z: GaussianInt) -> bool {
    z.re > 0 && z.im >= 0
}

/// The primitive element of the ray through `z`: `z / gcd(re, im)`.
pub fn primitive_of_ray(z: GaussianInt) -> Result<GaussianInt> {
    let c = canonicalize(z)?.value;
    let g = crate::arith::gcd_i64(c.re, c.im) as i64;
    Ok(GaussianInt::new(c.re / g, c.im / g))
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, im) => write!(f, "{im}i"),
            (re, im) if im < 0 => write!(f, "{re}-{}i", im.unsigned_abs()),
            (re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

impl FromStr for GaussianInt {
    type Err = Error;

    /// Accepts forms such as `3+4i`, `-3-4i`, `5`, `2i`, `-i`, `(1,2)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("not a Gaussian integer: {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            return Ok(GaussianInt::new(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(GaussianInt::new(t.parse().map_err(|_| bad())?, 0));
        };
        // split at the last sign that is not the leading one
        let cut = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(i, _)| i).last();
        let (re, im) = match cut {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1,
            "-" => -1,
            x => x.parse().map_err(|_| bad())?,
        };
        Ok(GaussianInt::new(re.parse().map_err(|_| bad())?, im))
    }
}

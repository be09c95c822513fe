//! Exact angular-separation tests modulo π/2.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::GaussianInt;
use crate::error::{Error, Result};

/// An angle, either a plain rational number of radians or a rational multiple of π.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AngleSpec {
    Radians(BigRational),
    PiTimes(BigRational),
}

impl AngleSpec {
    /// The angle `1/T`.
    pub fn reciprocal(t: u64) -> Self {
        AngleSpec::Radians(BigRational::new(BigInt::one(), BigInt::from(t)))
    }

    /// The angle `(π/2)/(10T)`.
    pub fn fejer_width(t: u64) -> Self {
        AngleSpec::PiTimes(BigRational::new(BigInt::one(), BigInt::from(20u64) * BigInt::from(t)))
    }

    pub fn approx(&self) -> f64 {
        match self {
            AngleSpec::Radians(r) => crate::rational::to_f64(r),
            AngleSpec::PiTimes(r) => crate::rational::to_f64(r) * std::f64::consts::PI,
        }
    }
}

/// Dyadic bounds `lo ≤ sin²θ ≤ hi` with `lo = lo_num/2^bits`, `hi = hi_num/2^bits`.
#[derive(Clone, Debug)]
pub struct SinSqBracket {
    angle: AngleSpec,
    bits: u32,
    lo_num: BigUint,
    hi_num: BigUint,
    lo_fast: Option<u128>,
    hi_fast: Option<u128>,
}

/// Outcome of an exact separation test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Separation {
    Within,
    Beyond,
    Indeterminate,
}

impl SinSqBracket {
    /// Brackets `sin²θ` to within `2^-bits`, for `0 < θ < π/2`.
    pub fn new(angle: AngleSpec, bits: u32) -> Result<Self> {
        if !(8..=4096).contains(&bits) {
            return Err(Error::InvalidArgument(format!("bracket precision {bits} outside 8..=4096 bits")));
        }
        let guard = bits + 16;
        let (t_lo, t_hi) = match &angle {
            AngleSpec::Radians(r) => {
                if !r.is_positive() || *r > BigRational::new(3.into(), 2.into()) {
                    return Err(Error::InvalidArgument(format!("angle {r} outside (0, 3/2]")));
                }
                (r.clone(), r.clone())
            }
            AngleSpec::PiTimes(r) => {
                if !r.is_positive() || *r >= BigRational::new(1.into(), 2.into()) {
                    return Err(Error::InvalidArgument(format!("angle {r}·π outside (0, π/2)")));
                }
                let (p_lo, p_hi) = pi_bounds(guard);
                (floor_dyadic(&(r * p_lo), guard), ceil_dyadic(&(r * p_hi), guard))
            }
        };
        let (s_lo, _) = sin_bounds(&t_lo, guard);
        let (_, s_hi) = sin_bounds(&t_hi, guard);
        let s_lo = if s_lo.is_negative() { BigRational::zero() } else { s_lo };
        let scale = BigRational::from_integer(BigInt::one() << bits);
        let lo = (&s_lo * &s_lo * &scale).floor().to_integer();
        let hi = (&s_hi * &s_hi * &scale).ceil().to_integer();
        let lo_num = lo.to_biguint().expect("nonnegative");
        let hi_num = hi.to_biguint().expect("nonnegative");
        Ok(SinSqBracket { angle, bits, lo_fast: lo_num.to_u128(), hi_fast: hi_num.to_u128(), lo_num, hi_num })
    }

    /// The same angle at twice the precision.
    pub fn widen(&self) -> Result<Self> {
        SinSqBracket::new(self.angle.clone(), self.bits * 2)
    }

    pub fn angle(&self) -> &AngleSpec {
        &self.angle
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(BigInt::from(self.lo_num.clone()), BigInt::one() << self.bits)
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(BigInt::from(self.hi_num.clone()), BigInt::one() << self.bits)
    }
}

/// Tests `dist(arg n1, arg n2) ≤ θ` on the circle of circumference π/2.
pub fn angular_separation_leq(n1: GaussianInt, n2: GaussianInt, bracket: &SinSqBracket) -> Result<Separation> {
    separation_test(n1, n2, bracket, false)
}

/// Tests `dist ≤ θ`, or `dist < θ` when `strict`, against the bracket of `sin²θ`.
///
/// With `c = n1·conj(n2)` the distance `d` satisfies `sin²d·N(n1)N(n2) = min(Re(c)², Im(c)²)`.
pub fn separation_test(n1: GaussianInt, n2: GaussianInt, bracket: &SinSqBracket, strict: bool) -> Result<Separation> {
    if n1.is_zero() || n2.is_zero() {
        return Err(Error::ZeroInput);
    }
    let (ar, ai, br, bi) = (n1.re as i128, n1.im as i128, n2.re as i128, -(n2.im as i128));
    let (cr, ci) = (
        ar.checked_mul(br).zip(ai.checked_mul(bi)).and_then(|(x, y)| x.checked_sub(y)),
        ar.checked_mul(bi).zip(ai.checked_mul(br)).and_then(|(x, y)| x.checked_add(y)),
    );
    let (n1n, n2n) = (n1.norm(), n2.norm());
    if let (Some(cr), Some(ci)) = (cr, ci) {
        let m = cr.unsigned_abs().min(ci.unsigned_abs());
        let fast = (|| {
            let val = m.checked_mul(m)?.checked_mul(1u128.checked_shl(bracket.bits)?)?;
            let nn = n1n.checked_mul(n2n)?;
            Some((val, bracket.lo_fast?.checked_mul(nn)?, bracket.hi_fast?.checked_mul(nn)?))
        })();
        if let Some((val, lo, hi)) = fast {
            return Ok(classify(val.cmp(&lo), val.cmp(&hi), strict));
        }
    }
    // 2^250-scale fallback
    let (br_, bi_) = (BigInt::from(br), BigInt::from(bi));
    let (ar_, ai_) = (BigInt::from(ar), BigInt::from(ai));
    let cr = &ar_ * &br_ - &ai_ * &bi_;
    let ci = &ar_ * &bi_ + &ai_ * &br_;
    let m = cr.abs().min(ci.abs()).to_biguint().expect("abs");
    let val = (&m * &m) << bracket.bits;
    let nn = BigUint::from(n1n) * BigUint::from(n2n);
    let lo = &bracket.lo_num * &nn;
    let hi = &bracket.hi_num * &nn;
    Ok(classify(val.cmp(&lo), val.cmp(&hi), strict))
}

fn classify(vs_lo: std::cmp::Ordering, vs_hi: std::cmp::Ordering, strict: bool) -> Separation {
    use std::cmp::Ordering::*;
    match (strict, vs_lo, vs_hi) {
        (false, Less | Equal, _) | (true, Less, _) => Separation::Within,
        (false, _, Greater) | (true, _, Greater | Equal) => Separation::Beyond,
        _ => Separation::Indeterminate,
    }
}

fn floor_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let s = BigInt::one() << bits;
    BigRational::new((x * BigRational::from_integer(s.clone())).floor().to_integer(), s)
}

fn ceil_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let s = BigInt::one() << bits;
    BigRational::new((x * BigRational::from_integer(s.clone())).ceil().to_integer(), s)
}

/// Bounds on `sin x` for `0 ≤ x ≤ 2` from the alternating Taylor series.
fn sin_bounds(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let tol = BigRational::new(BigInt::one(), BigInt::one() << (bits + 8));
    let x2 = x * x;
    let mut term = x.clone();
    let mut sum = BigRational::zero();
    let mut k = 0u64;
    loop {
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        term = &term * &x2 / BigRational::from_integer(BigInt::from((2 * k + 2) * (2 * k + 3)));
        k += 1;
        if term < tol {
            break;
        }
        // keep the working denominators short
        sum = floor_dyadic(&sum, bits + 24);
        term = ceil_dyadic(&term, bits + 24);
    }
    let slack = &term + BigRational::new(BigInt::from(k as i64 + 1), BigInt::one() << (bits + 24));
    (&sum - &slack, &sum + &slack)
}

/// Bounds on `arctan(1/n)` for an integer `n ≥ 2`.
fn atan_inv_bounds(n: u64, bits: u32) -> (BigRational, BigRational) {
    let tol = BigInt::one() << (bits + 8);
    let n2 = BigInt::from(n) * BigInt::from(n);
    let mut power = BigInt::from(n);
    let mut sum = BigRational::zero();
    let mut k = 0u64;
    loop {
        let term = BigRational::new(BigInt::one(), BigInt::from(2 * k + 1) * &power);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &n2;
        k += 1;
        if BigInt::from(2 * k + 1) * &power > tol {
            let next = BigRational::new(BigInt::one(), BigInt::from(2 * k + 1) * &power);
            return (&sum - &next, &sum + &next);
        }
    }
}

/// Machin's formula `π = 16·atan(1/5) − 4·atan(1/239)` with rigorous bounds.
fn pi_bounds(bits: u32) -> (BigRational, BigRational) {
    let (a_lo, a_hi) = atan_inv_bounds(5, bits);
    let (b_lo, b_hi) = atan_inv_bounds(239, bits);
    let sixteen = BigRational::from_integer(16.into());
    let four = BigRational::from_integer(4.into());
    let lo = &sixteen * a_lo - &four * b_hi;
    let hi = &sixteen * a_hi - &four * b_lo;
    (floor_dyadic(&lo, bits + 4), ceil_dyadic(&hi, bits + 4))
}

pub(crate) const MAX_WIDENINGS: u32 = 6;

/// Decides the predicate, widening the bracket until it is determinate.
/// Returns the answer and the number of widenings used.
pub(crate) fn decide(
    n1: GaussianInt,
    n2: GaussianInt,
    ladder: &mut Vec<SinSqBracket>,
    strict: bool,
) -> Result<(bool, u32)> {
    for level in 0..=MAX_WIDENINGS as usize {
        if level == ladder.len() {
            let next = ladder.last().expect("ladder starts nonempty").widen()?;
            ladder.push(next);
        }
        match separation_test(n1, n2, &ladder[level], strict)? {
            Separation::Within => return Ok((true, level as u32)),
            Separation::Beyond => return Ok((false, level as u32)),
            Separation::Indeterminate => {}
        }
    }
    Err(Error::Indeterminate(MAX_WIDENINGS))
}

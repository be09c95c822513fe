use std::f64::consts::PI;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{crt_pair, divisors, factor, gcd_u64, is_prime, is_squarefree, valuation};
use crate::error::{Error, Result};
use crate::gaussian::sqrt_minus_one_mod_prime;
use crate::rational::{int, ratio, to_f64, Rational};

/// Local factor `f_p(k, T1, T2)` for `k ≠ 0` and `v_p(T_i) ≤ 1`, with `p ∤ k` whenever `p | T1T2`.
pub fn local_factor_f(p: u64, k: i64, t1: u64, t2: u64) -> Result<Rational> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::ZeroInput);
    }
    if t1 == 0 || t2 == 0 {
        return Err(Error::ZeroInput);
    }
    let v1 = valuation(t1, p);
    let v2 = valuation(t2, p);
    let vk = valuation(k.unsigned_abs(), p);
    if v1 > 1 || v2 > 1 {
        return Err(Error::OutsideHypotheses(format!("{p}² divides a modulus")));
    }
    if v1 + v2 > 0 && vk > 0 {
        return Err(Error::OutsideHypotheses(format!("{p} divides both k and T1·T2")));
    }
    let pi = p as i64;
    if v1 + v2 == 0 {
        let pv = pi.checked_pow(vk).ok_or_else(|| Error::Overflow(format!("{p}^{vk}")))?;
        let num = pv.checked_mul(pi).ok_or_else(|| Error::Overflow(format!("{p}^{}", vk + 1)))? - 1;
        return Ok(ratio(num, pv * (pi - 1)));
    }
    Ok(match (p % 4, v1 + v2) {
        (1, _) => ratio(2 * pi, pi + 1),
        (3, _) => Rational::zero(),
        (_, 1) => ratio(2, 3),
        _ => Rational::zero(),
    })
}

fn mobius_prime_power(e: u32) -> i64 {
    match e {
        0 => 1,
        1 => -1,
        _ => 0,
    }
}

/// `g_p(k, D)`, the Möbius double sum of `f_p` values over `m_1n_1, m_2n_2 | (D, p)` with `(D, p) | m_1m_2`.
pub fn local_factor_g(p: u64, k: i64, d: u64) -> Result<Rational> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if d == 0 {
        return Err(Error::ZeroInput);
    }
    if !is_squarefree(d) {
        return Err(Error::OutsideHypotheses(format!("{d} is not square-free")));
    }
    let dp = gcd_u64(d, p);
    // (m, n) pairs as exponents of p
    let pairs: &[(u32, u32)] = if dp == 1 { &[(0, 0)] } else { &[(0, 0), (1, 0), (0, 1)] };
    let need = if dp == 1 { 0 } else { 1 };
    let mut total = Rational::zero();
    for &(a1, b1) in pairs {
        for &(a2, b2) in pairs {
            if a1 + a2 < need {
                continue;
            }
            let sign = mobius_prime_power(b1) * mobius_prime_power(b2);
            if sign == 0 {
                continue;
            }
            let t1 = p.pow(a1 + b1);
            let t2 = p.pow(a2 + b2);
            let f = local_factor_f(p, k, t1, t2)?;
            total += f * ratio(sign, (t1 * t2) as i64);
        }
    }
    Ok(total)
}

/// All `t mod T` with `t² ≡ −1`, sorted. `T = 1` gives `[0]`.
pub fn sqrt_minus_one_mod_squarefree(t: u64) -> Result<Vec<u64>> {
    if t == 0 {
        return Err(Error::ZeroInput);
    }
    if !is_squarefree(t) {
        return Err(Error::InvalidArgument(format!("{t} is not square-free")));
    }
    let mut roots = vec![0u64];
    let mut modulus = 1u64;
    for (p, _) in factor(t) {
        let local = match sqrt_minus_one_mod_prime(p) {
            Ok(r) if p == 2 => vec![r],
            Ok(r) => vec![r, p - r],
            Err(Error::NoRoot(_)) => return Ok(Vec::new()),
            Err(e) => return Err(e),
        };
        let mut next = Vec::with_capacity(roots.len() * local.len());
        for &a in &roots {
            for &b in &local {
                next.push(crt_pair(a, modulus, b, p)?);
            }
        }
        roots = next;
        modulus *= p;
    }
    roots.sort_unstable();
    Ok(roots)
}

/// The singular series of `(k, T1, T2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularSeriesValue {
    pub value: f64,
    /// `6/(T1T2π²)`.
    pub frame: f64,
    /// `Π f_p` over `p | kT1T2`.
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub product: Rational,
    #[serde(serialize_with = "crate::rational::serialize_factor_list")]
    pub local_factors: Vec<(u64, Rational)>,
}

impl SingularSeriesValue {
    /// `value / (6/π²)` as an exact rational.
    pub fn rational_multiplier(&self, t1: u64, t2: u64) -> Rational {
        &self.product / int((t1 * t2) as i64)
    }
}

pub(crate) fn check_hypotheses(k: i64, t1: u64, t2: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroInput);
    }
    if t1 == 0 || t2 == 0 {
        return Err(Error::ZeroInput);
    }
    for t in [t1, t2] {
        if !is_squarefree(t) {
            return Err(Error::OutsideHypotheses(format!("{t} is not square-free")));
        }
    }
    let t = t1.checked_mul(t2).ok_or_else(|| Error::Overflow("T1·T2".into()))?;
    if gcd_u64(k.unsigned_abs(), t) != 1 {
        return Err(Error::OutsideHypotheses(format!("k = {k} shares a factor with T1·T2 = {t}")));
    }
    Ok(())
}

fn product_route(k: i64, t1: u64, t2: u64) -> Result<(Rational, Vec<(u64, Rational)>)> {
    let mut primes: Vec<u64> =
        factor(k.unsigned_abs()).into_iter().chain(factor(t1)).chain(factor(t2)).map(|(p, _)| p).collect();
    primes.sort_unstable();
    primes.dedup();
    let mut product = Rational::one();
    let mut factors = Vec::with_capacity(primes.len());
    for p in primes {
        let f = local_factor_f(p, k, t1, t2)?;
        product *= &f;
        factors.push((p, f));
    }
    Ok((product, factors))
}

/// `Σ_{t1, t2} S_{t1,t2} / (6/π²)` summed over root pairs, exactly.
pub fn singular_series_by_root_pairs(k: i64, t1: u64, t2: u64) -> Result<Rational> {
    check_hypotheses(k, t1, t2)?;
    let r1 = sqrt_minus_one_mod_squarefree(t1)?;
    let r2 = sqrt_minus_one_mod_squarefree(t2)?;
    let sigma = divisors(k.unsigned_abs()).into_iter().fold(Rational::zero(), |acc, g| acc + ratio(1, g as i64));
    let mut bad: Vec<u64> = factor(t1).into_iter().chain(factor(t2)).map(|(p, _)| p).collect();
    bad.sort_unstable();
    bad.dedup();
    let mut total = Rational::zero();
    for &a in &r1 {
        for &b in &r2 {
            let mut term = Rational::one();
            for &p in &bad {
                let diff = (b as i64 - a as i64).unsigned_abs();
                let inner = gcd_u64(gcd_u64(p, t1), diff);
                let g = gcd_u64(p * inner, gcd_u64(p, t1) * gcd_u64(p, t2));
                let pp = (p * p) as i64;
                term *= (int(1) - ratio(g as i64, pp)) / (int(1) - ratio(1, pp));
            }
            total += term;
        }
    }
    Ok(total * &sigma / int((t1 * t2) as i64))
}

/// The singular series `6/(T1T2π²)·Π f_p`, cross-checked against the root-pair sum.
pub fn singular_series(k: i64, t1: u64, t2: u64) -> Result<SingularSeriesValue> {
    check_hypotheses(k, t1, t2)?;
    let (product, local_factors) = product_route(k, t1, t2)?;
    let frame = 6.0 / ((t1 * t2) as f64 * PI * PI);
    let other = singular_series_by_root_pairs(k, t1, t2)?;
    if other != &product / int((t1 * t2) as i64) {
        return Err(Error::Inconsistent(format!(
            "product route {product} and root-pair route {other} disagree for (k, T1, T2) = ({k}, {t1}, {t2})"
        )));
    }
    Ok(SingularSeriesValue { value: frame * to_f64(&product), frame, product, local_factors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_closed_forms() {
        assert_eq!(local_factor_f(5, 1, 5, 1).unwrap(), ratio(5, 3));
        assert_eq!(local_factor_f(3, 1, 3, 1).unwrap(), int(0));
        assert_eq!(local_factor_f(2, 2, 1, 1).unwrap(), ratio(3, 2));
        assert_eq!(local_factor_f(7, 1, 1, 1).unwrap(), int(1));
        assert_eq!(local_factor_f(5, 1, 5, 5).unwrap(), ratio(5, 3));
        assert!(matches!(local_factor_f(5, 5, 5, 1), Err(Error::OutsideHypotheses(_))));
        assert!(matches!(local_factor_f(5, 1, 25, 1), Err(Error::OutsideHypotheses(_))));
    }

    #[test]
    fn g_values() {
        assert_eq!(local_factor_g(5, 1, 5).unwrap(), ratio(3, 5));
        assert_eq!(local_factor_g(13, 1, 13).unwrap(), ratio(4 * 13 - 2, 13 * 14));
        assert_eq!(local_factor_g(3, 1, 3).unwrap(), int(0));
        assert_eq!(local_factor_g(7, 1, 1).unwrap(), int(1));
    }

    #[test]
    fn roots_of_minus_one() {
        assert_eq!(sqrt_minus_one_mod_squarefree(65).unwrap(), vec![8, 18, 47, 57]);
        assert_eq!(sqrt_minus_one_mod_squarefree(1).unwrap(), vec![0]);
        assert!(sqrt_minus_one_mod_squarefree(3).unwrap().is_empty());
        assert_eq!(sqrt_minus_one_mod_squarefree(10).unwrap(), vec![3, 7]);
    }

    #[test]
    fn series_examples() {
        let s = singular_series(1, 1, 1).unwrap();
        assert!((s.value - 6.0 / (PI * PI)).abs() < 1e-15);
        assert_eq!(singular_series(1, 3, 1).unwrap().value, 0.0);
        let s = singular_series(1, 5, 1).unwrap();
        assert!((s.value - 2.0 / (PI * PI)).abs() < 1e-15);
        assert!(singular_series(5, 5, 1).is_err());
    }
}

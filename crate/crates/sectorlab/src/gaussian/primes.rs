use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{canonicalize, gaussian_gcd, GaussianInt};
use crate::arith::{factor, is_prime, isqrt, pow_mod, primes_up_to};
use crate::error::{Error, Result};

/// Largest norm the sieve accepts.
pub const MAX_SIEVE_NORM: u64 = 1 << 48;

const SEGMENT: u64 = 1 << 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimeKind {
    Ramified,
    Split,
    Inert,
}

/// How a rational prime decomposes in ℤ[i]. Split primes list both conjugates,
/// ordered by real part descending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeClassification {
    pub kind: PrimeKind,
    pub primes: Vec<GaussianInt>,
}

/// Smallest `t ∈ [0, p/2]` with `t² ≡ −1 (mod p)`.
pub fn sqrt_minus_one_mod_prime(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    if p % 4 == 3 {
        return Err(Error::NoRoot(p));
    }
    let c = (2..p).find(|&c| pow_mod(c, (p - 1) / 2, p) == p - 1).expect("a non-residue exists");
    let t = pow_mod(c, (p - 1) / 4, p);
    Ok(t.min(p - t))
}

pub fn split_rational_prime(p: u64) -> Result<PrimeClassification> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Ok(PrimeClassification { kind: PrimeKind::Ramified, primes: vec![GaussianInt::new(1, 1)] });
    }
    if p % 4 == 3 {
        return Ok(PrimeClassification { kind: PrimeKind::Inert, primes: vec![GaussianInt::new(p as i64, 0)] });
    }
    let pi = split_prime_factor(p)?;
    let conj = canonicalize(pi.conj())?.value;
    let mut primes = vec![pi, conj];
    primes.sort_by_key(|z| std::cmp::Reverse(z.re));
    Ok(PrimeClassification { kind: PrimeKind::Split, primes })
}

/// A canonical Gaussian prime of norm `p`, for a prime `p ≡ 1 (mod 4)`.
fn split_prime_factor(p: u64) -> Result<GaussianInt> {
    let t = sqrt_minus_one_mod_prime(p)?;
    Ok(gaussian_gcd(GaussianInt::new(p as i64, 0), GaussianInt::new(t as i64, 1)))
}

/// Every canonical Gaussian prime with norm in `[lo, hi]`, sorted by norm and
/// then by real part descending.
pub fn gaussian_primes_by_norm(lo: u64, hi: u64) -> Result<Vec<GaussianInt>> {
    if lo < 2 || lo > hi {
        return Err(Error::InvalidArgument(format!("need 2 ≤ lo ≤ hi, got [{lo}, {hi}]")));
    }
    if hi > MAX_SIEVE_NORM {
        return Err(Error::Overflow(format!("sieve bound {hi} exceeds {MAX_SIEVE_NORM}")));
    }
    let base = primes_up_to(isqrt(hi));
    let starts: Vec<u64> = (lo..=hi).step_by(SEGMENT as usize).collect();
    let segments: Vec<Vec<(u64, GaussianInt)>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + SEGMENT - 1).min(hi);
            sieve_segment(start, end, &base)
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<(u64, GaussianInt)> = segments.into_iter().flatten().collect();
    // inert primes p have norm p², drawn from the base primes
    let (r_lo, r_hi) = (isqrt(lo - 1) + 1, isqrt(hi));
    for &p in base.iter().filter(|&&p| p % 4 == 3 && p >= r_lo && p <= r_hi) {
        out.push((p * p, GaussianInt::new(p as i64, 0)));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.re.cmp(&a.1.re)));
    Ok(out.into_iter().map(|(_, z)| z).collect())
}

/// Number of canonical Gaussian primes with norm at most `x`.
pub fn gaussian_prime_count(x: u64) -> Result<usize> {
    if x < 2 {
        return Ok(0);
    }
    Ok(gaussian_primes_by_norm(2, x)?.len())
}

fn sieve_segment(start: u64, end: u64, base: &[u64]) -> Result<Vec<(u64, GaussianInt)>> {
    let len = (end - start + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p > end {
            break;
        }
        let first = (p * p).max(start.div_ceil(p) * p);
        let mut m = first;
        while m <= end {
            composite[(m - start) as usize] = true;
            m += p;
        }
    }
    let mut out = Vec::new();
    for (i, &c) in composite.iter().enumerate() {
        let q = start + i as u64;
        if c || q < 2 {
            continue;
        }
        match q % 4 {
            2 => out.push((2, GaussianInt::new(1, 1))),
            1 => {
                let pi = split_prime_factor(q)?;
                let other = canonicalize(pi.conj())?.value;
                let (a, b) = if pi.re >= other.re { (pi, other) } else { (other, pi) };
                out.push((q, a));
                out.push((q, b));
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Number of divisors of `n` in ℤ[i], counted up to units.
pub fn tau_gaussian(n: GaussianInt) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let nn = n.norm_u64()?;
    let mut tau = 1u64;
    for (q, e) in factor(nn) {
        tau *= match q % 4 {
            2 => e as u64 + 1,
            3 => e as u64 / 2 + 1,
            _ => {
                let pi = split_prime_factor(q)?;
                let mut rest = n;
                let mut a = 0u64;
                while let Some(next) = rest.div_exact(pi) {
                    rest = next;
                    a += 1;
                }
                (a + 1) * (e as u64 - a + 1)
            }
        };
    }
    Ok(tau)
}

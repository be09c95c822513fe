//! Machine-word number theory: modular arithmetic, primality, factoring.

use crate::error::{Error, Result};

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> u64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs())
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut x, mut y, mut g, mut q) = (2u64, 2u64, 1u64, 1u64);
    let mut ys = 2u64;
    let mut r = 1u64;
    const M: u64 = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..M.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += M;
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// Prime factorization as sorted `(prime, exponent)` pairs. `factor(1)` is empty.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factor(0)");
    let mut primes = Vec::new();
    let mut n = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            primes.push(p);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let d = (1..).find_map(|c| pollard_brent(m, c)).expect("rho finds a factor");
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n > 0 && factor(n).iter().all(|&(_, e)| e == 1)
}

/// Exponent of `p` in `n`; `n` must be nonzero.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn divisor_count(n: u64) -> u64 {
    factor(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

pub fn divisor_sum(n: u64) -> u128 {
    factor(n).iter().map(|&(p, e)| (0..=e).map(|i| (p as u128).pow(i)).sum::<u128>()).product()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factor(n) {
        let len = ds.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Plain sieve of Eratosthenes: all primes `<= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// Chinese remaindering of `x ≡ a (mod m)` and `x ≡ b (mod n)` for coprime moduli.
pub fn crt_pair(a: u64, m: u64, b: u64, n: u64) -> Result<u64> {
    let inv = inv_mod(m as i128, n as i128)
        .ok_or_else(|| Error::InvalidArgument(format!("moduli {m} and {n} are not coprime")))?;
    let diff = (b as i128 - a as i128).rem_euclid(n as i128);
    let t = (diff * inv).rem_euclid(n as i128);
    Ok((a as i128 + m as i128 * t) as u64)
}

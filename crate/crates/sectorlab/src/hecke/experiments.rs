use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sum_with_args;
use crate::arith::isqrt;
use crate::error::{Error, Result};
use crate::exppair::ExactPair;
use crate::gaussian::{arg_mod_quarter, gaussian_primes_by_norm, GaussianInt};

/// Sectors of half-width `half_width` around every `t ∈ [0, π/2]` where
/// `Im((1+i·tan t)^k)·Im((1+i·tan 2t)^k) = 0` for some `k ≤ max_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoughSectorExclusion {
    pub max_k: u32,
    pub half_width: f64,
}

impl RoughSectorExclusion {
    /// The roots, sorted and deduplicated: `t = jπ/k` from the first factor and
    /// `t = jπ/(2k)` from the second, skipping points where the tangent is undefined.
    pub fn roots(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 1..=self.max_k as u64 {
            // first factor: sin(kt) = 0 with tan t finite
            for j in 0..=k {
                if 2 * j < k {
                    out.push((j, k));
                }
            }
            // second factor: sin(2kt) = 0 with tan 2t finite, i.e. 2j/k not odd
            for j in 0..=k {
                let undefined = (2 * j) % k == 0 && ((2 * j) / k) % 2 == 1;
                if !undefined {
                    out.push((j, 2 * k));
                }
            }
        }
        let mut roots: Vec<f64> = out.into_iter().map(|(j, d)| j as f64 * PI / d as f64).collect();
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        roots
    }

    /// Whether an argument in `[0, π/2)` falls in an excluded sector (distances taken mod π/2).
    pub fn excludes(&self, arg: f64) -> bool {
        self.roots().iter().any(|&r| {
            let d = (arg - r).rem_euclid(FRAC_PI_2);
            d.min(FRAC_PI_2 - d) <= self.half_width
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothSumRow {
    pub m: i64,
    pub value_abs: f64,
    /// `|m|^κ N^{(λ−κ+1)/2}`.
    pub bound_pair: f64,
    pub ratio_pair: f64,
    /// `|m|^{1/3} N^{1/2}`.
    pub bound_cube_root: f64,
    pub ratio_cube_root: f64,
}

/// `|Σ λ^m(n)|` over canonical `n` with `N < N(n) ≤ N'` outside the excluded sectors.
pub fn smooth_sum_experiment(
    big_n: u64,
    big_n_prime: u64,
    ms: &[i64],
    exclusion: Option<&RoughSectorExclusion>,
    pair: &ExactPair,
) -> Result<Vec<SmoothSumRow>> {
    if big_n_prime < big_n || big_n_prime > 2 * big_n {
        return Err(Error::Precondition(format!("need N ≤ N' ≤ 2N, got N = {big_n}, N' = {big_n_prime}")));
    }
    if ms.contains(&0) {
        return Err(Error::InvalidArgument("m = 0 is excluded from the bound experiments".into()));
    }
    let roots = exclusion.map(|e| (e.roots(), e.half_width));
    let mut terms = Vec::new();
    for a in 1..=isqrt(big_n_prime) {
        let a2 = a * a;
        let b_lo = if a2 > big_n { 0 } else { isqrt(big_n - a2) + 1 };
        for b in b_lo..=isqrt(big_n_prime - a2) {
            let arg = arg_mod_quarter(GaussianInt::new(a as i64, b as i64))?;
            let excluded = roots.as_ref().is_some_and(|(rs, w)| {
                rs.iter().any(|&r| {
                    let d = (arg - r).rem_euclid(FRAC_PI_2);
                    d.min(FRAC_PI_2 - d) <= *w
                })
            });
            if !excluded {
                terms.push((arg, Complex64::new(1.0, 0.0)));
            }
        }
    }
    let (kappa, lambda) = pair.to_f64();
    let nf = big_n as f64;
    Ok(ms
        .par_iter()
        .map(|&m| {
            let value_abs = sum_with_args(&terms, m).norm();
            let mf = m.unsigned_abs() as f64;
            let bound_pair = mf.powf(kappa) * nf.powf((lambda - kappa + 1.0) / 2.0);
            let bound_cube_root = mf.cbrt() * nf.sqrt();
            SmoothSumRow {
                m,
                value_abs,
                bound_pair,
                ratio_pair: value_abs / bound_pair,
                bound_cube_root,
                ratio_cube_root: value_abs / bound_cube_root,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: u64,
    pub m: i64,
    pub value_abs: f64,
    /// `exp(−(log N)^{1/10})`.
    pub bound: f64,
    pub ratio: f64,
}

/// `|Σ_{N < N(p) ≤ 2N} λ^m(p)/N(p)|` over canonical Gaussian primes.
pub fn prime_sum_decay_experiment(ns: &[u64], ms: &[i64]) -> Result<Vec<DecayRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        if n < 1 {
            return Err(Error::InvalidArgument("N must be positive".into()));
        }
        let primes = gaussian_primes_by_norm(n + 1, 2 * n)?;
        let terms: Vec<(f64, Complex64)> = primes
            .iter()
            .map(|p| Ok((arg_mod_quarter(*p)?, Complex64::new(1.0 / p.norm() as f64, 0.0))))
            .collect::<Result<_>>()?;
        let bound = (-(n as f64).ln().powf(0.1)).exp();
        let part: Vec<DecayRow> = ms
            .par_iter()
            .map(|&m| {
                let value_abs = sum_with_args(&terms, m).norm();
                DecayRow { n, m, value_abs, bound, ratio: value_abs / bound }
            })
            .collect();
        rows.extend(part);
    }
    Ok(rows)
}

/// `(−1)^n (n−1)!/(x²+y²)^n · Im((x+iy)^n)`, the `n`-th `x`-derivative of `arctan(y/x)`.
pub fn phase_derivative(x: f64, y: f64, n: u32) -> Result<f64> {
    if x == 0.0 && y == 0.0 {
        return Err(Error::ZeroInput);
    }
    if n == 0 {
        return Err(Error::InvalidArgument("derivative order must be at least 1".into()));
    }
    let fact: f64 = (1..n).map(|k| k as f64).product();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let r2 = x * x + y * y;
    let im = Complex64::new(x, y).powu(n).im;
    Ok(sign * fact / r2.powi(n as i32) * im)
}

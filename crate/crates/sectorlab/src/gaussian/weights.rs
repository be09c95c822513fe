//! Almost-prime and rough-number weights on ℤ[i]*.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{canonicalize, gaussian_primes_by_norm, GaussianInt};
use crate::arith::{factor, isqrt};
use crate::error::{Error, Result};

/// A point of ℤ[i]* with an exact nonnegative weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub z: GaussianInt,
    pub weight: Ratio<u64>,
}

/// Products `p_1⋯p_k` with `X < N(n) ≤ 2X` and `N(p_j)` in window `j` for `j < k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlmostPrimeConfig {
    pub k: u8,
    pub x: u64,
    /// Inclusive norm windows for `p_1, …, p_{k−1}`.
    pub factor_windows: Vec<(u64, u64)>,
    pub epsilon: f64,
}

impl AlmostPrimeConfig {
    /// Windows `[P_j^{1−ε}, P_j]` rounded inward to integers, endpoints included.
    pub fn from_scales(k: u8, x: u64, scales: &[f64], epsilon: f64) -> Result<Self> {
        let factor_windows = scales
            .iter()
            .map(|&p| ((p.powf(1.0 - epsilon) - 1e-9).ceil().max(2.0) as u64, (p + 1e-9).floor() as u64))
            .collect();
        let config = AlmostPrimeConfig { k, x, factor_windows, epsilon };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.k) {
            return Err(Error::InvalidArgument(format!("k must be 2 or 3, got {}", self.k)));
        }
        if self.factor_windows.len() != self.k as usize - 1 {
            return Err(Error::InvalidArgument(format!(
                "k = {} needs {} factor windows, got {}",
                self.k,
                self.k - 1,
                self.factor_windows.len()
            )));
        }
        if self.x < 1 {
            return Err(Error::InvalidArgument("X must be positive".into()));
        }
        if let Some(&(lo, hi)) = self.factor_windows.iter().find(|&&(lo, hi)| lo < 1 || lo > hi) {
            return Err(Error::InvalidArgument(format!("bad factor window [{lo}, {hi}]")));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::InvalidArgument(format!("epsilon {} outside [0, 1)", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlmostPrimeSet {
    pub points: Vec<WeightedPoint>,
    pub warning: Option<String>,
}

/// Each `n` appears once, with weight `1/N(n)`, however many factorizations it has.
pub fn almost_prime_weights(config: &AlmostPrimeConfig) -> Result<AlmostPrimeSet> {
    config.validate()?;
    let x = config.x as u128;
    let min_prefix: u128 = config.factor_windows.iter().map(|&(lo, _)| lo as u128).product();
    let empty = |why: String| Ok(AlmostPrimeSet { points: Vec::new(), warning: Some(why) });
    if min_prefix > 2 * x {
        return empty(format!("window minima multiply to {min_prefix} > 2X"));
    }
    let mut windows = Vec::new();
    for &(lo, hi) in &config.factor_windows {
        let ps = if hi < 2 { Vec::new() } else { gaussian_primes_by_norm(lo.max(2), hi)? };
        if ps.is_empty() {
            return empty(format!("no Gaussian prime has norm in [{lo}, {hi}]"));
        }
        windows.push(ps);
    }
    let last_hi = (2 * x / min_prefix.max(1)) as u64;
    let tail: Vec<(u64, GaussianInt)> = if last_hi >= 2 {
        gaussian_primes_by_norm(2, last_hi)?.into_iter().map(|z| (z.norm() as u64, z)).collect()
    } else {
        Vec::new()
    };
    let mut prefixes: Vec<(u128, GaussianInt)> = vec![(1, GaussianInt::ONE)];
    for window in &windows {
        let mut next = Vec::new();
        for &(n, z) in &prefixes {
            for &p in window {
                let m = n * p.norm();
                if m <= 2 * x {
                    next.push((m, z.checked_mul(p).ok_or_else(|| Error::Overflow("prefix product".into()))?));
                }
            }
        }
        prefixes = next;
    }
    let mut out = Vec::new();
    for (n, z) in prefixes {
        // X/n < N(p_k) ≤ 2X/n
        let lo = (x / n) as u64;
        let hi = (2 * x / n) as u64;
        let start = tail.partition_point(|&(m, _)| m <= lo);
        let end = tail.partition_point(|&(m, _)| m <= hi);
        for &(_, p) in &tail[start..end] {
            let prod = z.checked_mul(p).ok_or_else(|| Error::Overflow("product".into()))?;
            out.push(canonicalize(prod)?.value);
        }
    }
    out.sort_unstable();
    out.dedup();
    let warning = out.is_empty().then(|| "no product lands in (X, 2X]".to_string());
    let points = out.into_iter().map(|z| WeightedPoint { z, weight: Ratio::new(1, z.norm() as u64) }).collect();
    Ok(AlmostPrimeSet { points, warning })
}

/// Excludes `n` having a prime factor whose norm lies in `[2, cutoff]` outside
/// every exempt interval `[z_i, z_i²]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoughNumberFilter {
    pub exempt_intervals: Vec<(f64, f64)>,
    pub cutoff: f64,
}

impl RoughNumberFilter {
    /// Exempt intervals `[z_i, z_i²]` with the cutoff `2X^{1/2}`.
    pub fn new(exempt_starts: &[f64], x: u64) -> Result<Self> {
        let mut intervals: Vec<(f64, f64)> = exempt_starts.iter().map(|&z| (z, z * z)).collect();
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let filter = RoughNumberFilter { exempt_intervals: intervals, cutoff: 2.0 * (x as f64).sqrt() };
        filter.validate()?;
        Ok(filter)
    }

    pub fn validate(&self) -> Result<()> {
        for &(a, b) in &self.exempt_intervals {
            if !(a >= 1.0 && b >= a) {
                return Err(Error::InvalidArgument(format!("bad exempt interval [{a}, {b}]")));
            }
        }
        for w in self.exempt_intervals.windows(2) {
            if w[1].0 <= w[0].1 {
                return Err(Error::InvalidArgument(format!("exempt intervals {:?} and {:?} overlap", w[0], w[1])));
            }
        }
        Ok(())
    }

    /// Whether a Gaussian prime of norm `q` may divide an admissible `n`.
    pub fn allows_prime_norm(&self, q: u64) -> bool {
        let q = q as f64;
        q < 2.0 || q > self.cutoff || self.exempt_intervals.iter().any(|&(a, b)| a <= q && q <= b)
    }
}

/// Weights `1/N(n)` on admissible `n` with `X ≤ N(n) ≤ (1+η)X`.
pub fn rough_weights(filter: &RoughNumberFilter, x: u64, eta: f64) -> Result<Vec<WeightedPoint>> {
    filter.validate()?;
    if !(eta >= 0.0) {
        return Err(Error::InvalidArgument(format!("eta must be nonnegative, got {eta}")));
    }
    let hi = ((1.0 + eta) * x as f64).floor() as u64;
    let mut out = Vec::new();
    for a in 1..=isqrt(hi) {
        let a2 = a * a;
        let b_lo = if a2 >= x { 0 } else { isqrt(x - a2 - 1) + 1 };
        let b_hi = isqrt(hi - a2);
        for b in b_lo..=b_hi {
            let n = a2 + b * b;
            // a Gaussian prime above q has norm q, or q² when q ≡ 3 (mod 4)
            let ok = factor(n).iter().all(|&(q, _)| filter.allows_prime_norm(if q % 4 == 3 { q * q } else { q }));
            if ok {
                out.push(WeightedPoint { z: GaussianInt::new(a as i64, b as i64), weight: Ratio::new(1, n) });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_four_to_six() {
        let cfg = AlmostPrimeConfig { k: 2, x: 40, factor_windows: vec![(4, 6)], epsilon: 0.5 };
        let set = almost_prime_weights(&cfg).unwrap();
        let target = GaussianInt::new(4, 7);
        let hit = set.points.iter().find(|p| p.z == target).expect("4+7i is (2+i)(3+2i)");
        assert_eq!(hit.weight, Ratio::new(1, 65));
        assert!(set.points.iter().all(|p| p.weight == Ratio::new(1, p.z.norm() as u64)));
        assert!(set.points.iter().all(|p| (41..=80).contains(&p.z.norm())));
    }

    #[test]
    fn empty_window_warns() {
        let cfg = AlmostPrimeConfig { k: 2, x: 40, factor_windows: vec![(3, 3)], epsilon: 0.5 };
        let set = almost_prime_weights(&cfg).unwrap();
        assert!(set.points.is_empty());
        assert!(set.warning.is_some());
    }

    #[test]
    fn bad_configs() {
        let cfg = AlmostPrimeConfig { k: 4, x: 40, factor_windows: vec![], epsilon: 0.5 };
        assert!(almost_prime_weights(&cfg).is_err());
        let cfg = AlmostPrimeConfig { k: 3, x: 40, factor_windows: vec![(2, 5)], epsilon: 0.5 };
        assert!(almost_prime_weights(&cfg).is_err());
    }

    #[test]
    fn rough_filter_everything_exempt() {
        let x = 100;
        let filter = RoughNumberFilter::new(&[2.0, 5.0], x).unwrap();
        assert!(filter.exempt_intervals[1].1 >= filter.cutoff);
        let all = rough_weights(&filter, x, 0.1).unwrap();
        let brute = (1..=10i64)
            .flat_map(|a| (0..=10i64).map(move |b| (a, b)))
            .filter(|&(a, b)| (100..=110).contains(&(a * a + b * b)))
            .count();
        assert_eq!(all.len(), brute);
    }

    #[test]
    fn overlapping_exemptions_rejected() {
        assert!(RoughNumberFilter::new(&[2.0, 3.0], 100).is_err());
        assert!(RoughNumberFilter::new(&[0.5], 100).is_err());
    }
}

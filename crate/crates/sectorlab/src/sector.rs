//! Statistics of weighted point sets in sectors `θ ≤ arg n < θ + w` (mod π/2).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::isqrt;
use crate::error::{Error, Result};
use crate::gaussian::angle::decide;
use crate::gaussian::{arg_mod_quarter, is_canonical, AngleSpec, GaussianInt, SinSqBracket};
use crate::numeric::{CompensatedSum, ExactSum};
use crate::rational;

pub use crate::gaussian::WeightedPoint;

/// Points of ℤ[i]* with exact weights, at scale `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPointSet {
    pub points: Vec<WeightedPoint>,
    pub x: u64,
    pub label: String,
}

impl WeightedPointSet {
    pub fn new(points: Vec<WeightedPoint>, x: u64, label: impl Into<String>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !is_canonical(p.z)) {
            return Err(Error::InvalidArgument(format!("{} is not in the first quadrant", p.z)));
        }
        Ok(WeightedPointSet { points, x, label: label.into() })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn args(&self) -> Vec<f64> {
        self.points.iter().map(|p| arg_mod_quarter(p.z).expect("canonical points are nonzero")).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(weight_f64).collect::<ExactSum>().value()
    }

    pub fn total_weight_exact(&self) -> BigRational {
        self.points.iter().map(weight_exact).fold(BigRational::zero(), |a, b| a + b)
    }
}

fn weight_f64(p: &WeightedPoint) -> f64 {
    *p.weight.numer() as f64 / *p.weight.denom() as f64
}

fn weight_exact(p: &WeightedPoint) -> BigRational {
    BigRational::new(BigInt::from(*p.weight.numer()), BigInt::from(*p.weight.denom()))
}

/// The half-open window `[θ, θ + width)`, wrapping modulo π/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorWindow {
    pub theta: f64,
    pub width: f64,
}

impl SectorWindow {
    pub fn new(theta: f64, width: f64) -> Result<Self> {
        if !(0.0..FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidArgument(format!("theta {theta} outside [0, π/2)")));
        }
        if !(width > 0.0 && width < FRAC_PI_2) {
            return Err(Error::InvalidArgument(format!("width {width} outside (0, π/2)")));
        }
        Ok(SectorWindow { theta, width })
    }

    pub fn contains(&self, arg: f64) -> bool {
        (arg - self.theta).rem_euclid(FRAC_PI_2) < self.width
    }
}

pub fn window_sum(set: &WeightedPointSet, window: SectorWindow) -> f64 {
    set.points
        .iter()
        .zip(set.args())
        .filter(|(_, a)| window.contains(*a))
        .map(|(p, _)| weight_f64(p))
        .collect::<ExactSum>()
        .value()
}

pub fn window_sum_exact(set: &WeightedPointSet, window: SectorWindow) -> BigRational {
    set.points
        .iter()
        .zip(set.args())
        .filter(|(_, a)| window.contains(*a))
        .map(|(p, _)| weight_exact(p))
        .fold(BigRational::zero(), |a, b| a + b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    /// `∫_0^{π/2} (S(θ) − μ)² dθ` with `μ = width/(π/2) · Σ w`.
    pub variance: f64,
    /// `(1/(π/2)) ∫ S(θ) dθ`, which equals `μ` up to rounding.
    pub mean_window_sum: f64,
    pub breakpoint_count: usize,
    /// `variance · (log X)² / width²`.
    pub normalized_ratio: f64,
    pub empty: bool,
}

/// The variance integral computed exactly by a sweep over window entry and exit angles.
pub fn exact_window_variance(set: &WeightedPointSet, width: f64) -> Result<VarianceReport> {
    if !(width > 0.0 && width < FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!("width {width} outside (0, π/2)")));
    }
    let pts: Vec<(f64, f64)> = set
        .points
        .iter()
        .zip(set.args())
        .filter(|(p, _)| *p.weight.numer() > 0)
        .map(|(p, a)| (a, weight_f64(p)))
        .collect();
    let log_x = (set.x.max(2) as f64).ln();
    let scale = log_x * log_x / (width * width);
    if pts.is_empty() {
        return Ok(VarianceReport {
            variance: 0.0,
            mean_window_sum: 0.0,
            breakpoint_count: 0,
            normalized_ratio: 0.0,
            empty: true,
        });
    }
    let total: f64 = pts.iter().map(|&(_, w)| w).collect::<ExactSum>().value();
    let mu = width / FRAC_PI_2 * total;
    // θ enters (arg − width, arg]: +w past the entry angle, −w past arg
    let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    let mut s = CompensatedSum::new();
    for &(a, w) in &pts {
        events.push(((a - width).rem_euclid(FRAC_PI_2), w));
        events.push((a, -w));
        if a < width {
            s.add(w);
        }
    }
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut integral = CompensatedSum::new();
    let mut first_moment = CompensatedSum::new();
    let mut prev = 0.0;
    for &(angle, delta) in &events {
        let len = angle - prev;
        if len > 0.0 {
            let v = s.value();
            integral.add((v - mu) * (v - mu) * len);
            first_moment.add(v * len);
            prev = angle;
        }
        s.add(delta);
    }
    let v = s.value();
    integral.add((v - mu) * (v - mu) * (FRAC_PI_2 - prev));
    first_moment.add(v * (FRAC_PI_2 - prev));
    let variance = integral.value().max(0.0);
    Ok(VarianceReport {
        variance,
        mean_window_sum: first_moment.value() / FRAC_PI_2,
        breakpoint_count: events.len(),
        normalized_ratio: variance * scale,
        empty: false,
    })
}

/// Measure of `θ ∈ [0, π/2)` whose window holds at least one positive-weight point.
pub fn covered_measure(set: &WeightedPointSet, width: f64) -> f64 {
    let mut args: Vec<f64> =
        set.points.iter().zip(set.args()).filter(|(p, _)| *p.weight.numer() > 0).map(|(_, a)| a).collect();
    if args.is_empty() {
        return 0.0;
    }
    args.sort_by(f64::total_cmp);
    // the union of arcs (a − width, a] is Σ min(gap before a, width)
    let mut acc = CompensatedSum::new();
    for i in 0..args.len() {
        let gap = if i == 0 { args[0] + FRAC_PI_2 - args[args.len() - 1] } else { args[i] - args[i - 1] };
        acc.add(gap.min(width));
    }
    acc.value().min(FRAC_PI_2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSum {
    pub value: f64,
    /// Ordered pairs counted, diagonal included.
    pub pairs: u64,
    /// Bracket widenings needed by indeterminate comparisons.
    pub retries: u32,
}

/// `Σ w₁w₂` over ordered pairs (diagonal included) with angular distance at most `angle`.
pub fn weighted_pair_sum(points: &[(GaussianInt, f64)], angle: &AngleSpec) -> Result<PairSum> {
    let mut pts: Vec<(f64, GaussianInt, f64)> = Vec::with_capacity(points.len());
    for &(z, w) in points {
        if !is_canonical(z) {
            return Err(Error::InvalidArgument(format!("{z} is not in the first quadrant")));
        }
        pts.push((arg_mod_quarter(z)?, z, w));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let n = pts.len();
    let mut sum = ExactSum::new();
    let mut pairs = 0u64;
    let mut retries = 0u32;
    for &(_, _, w) in &pts {
        sum.add(w * w);
    }
    pairs += n as u64;
    let theta = angle.approx();
    if theta >= FRAC_PI_4 {
        for i in 0..n {
            for j in i + 1..n {
                sum.add(2.0 * (pts[i].2 * pts[j].2));
            }
        }
        pairs += (n * n.saturating_sub(1)) as u64;
        return Ok(PairSum { value: sum.value(), pairs, retries });
    }
    let mut ladder = vec![SinSqBracket::new(angle.clone(), 64)?];
    let reach = theta + 1e-9;
    for i in 0..n {
        for step in 1..n {
            let j = (i + step) % n;
            let gap = if j > i { pts[j].0 - pts[i].0 } else { pts[j].0 + FRAC_PI_2 - pts[i].0 };
            if gap > reach {
                break;
            }
            let (within, used) = decide(pts[i].1, pts[j].1, &mut ladder, false)?;
            retries += used;
            if within {
                sum.add(2.0 * (pts[i].2 * pts[j].2));
                pairs += 2;
            }
        }
    }
    Ok(PairSum { value: sum.value(), pairs, retries })
}

/// `T · Σ w₁w₂` over pairs with `|arg n₁ − arg n₂| ≤ 1/T`, diagonal included.
pub fn pair_proximity_sum(set: &WeightedPointSet, t: u64) -> Result<PairSum> {
    if t == 0 {
        return Err(Error::InvalidArgument("T must be positive".into()));
    }
    let pts: Vec<(GaussianInt, f64)> = set.points.iter().map(|p| (p.z, weight_f64(p))).collect();
    let mut r = weighted_pair_sum(&pts, &AngleSpec::reciprocal(t))?;
    r.value *= t as f64;
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorCount {
    pub count: u64,
    pub ratio: f64,
}

/// Counts `m ∈ ℤ[i]` with `N(m) ≤ N` and `0 < dist(arg m, arg n) < v/N`.
pub fn sector_count_bound_check(n: GaussianInt, big_n: u64, v: f64) -> Result<SectorCount> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    if n.norm() > big_n as u128 {
        return Err(Error::Precondition(format!("N({n}) exceeds N = {big_n}")));
    }
    if !(v > 0.0) {
        return Err(Error::InvalidArgument(format!("v must be positive, got {v}")));
    }
    let angle = rational::from_f64(v)? / BigRational::from_integer(big_n.into());
    let everything = rational::to_f64(&angle) > 0.8;
    let mut ladder = if everything { Vec::new() } else { vec![SinSqBracket::new(AngleSpec::Radians(angle), 64)?] };
    let mut canonical = 0u64;
    for a in 1..=isqrt(big_n) {
        for b in 0..=isqrt(big_n - a * a) {
            let m = GaussianInt::new(a as i64, b as i64);
            let c = m.checked_mul(n.conj()).ok_or_else(|| Error::Overflow("m·conj(n)".into()))?;
            if c.re == 0 || c.im == 0 {
                continue;
            }
            if everything || decide(m, n, &mut ladder, true)?.0 {
                canonical += 1;
            }
        }
    }
    // four associates share each argument
    let count = 4 * canonical;
    Ok(SectorCount { count, ratio: count as f64 / v })
}

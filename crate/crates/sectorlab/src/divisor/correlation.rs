use rayon::prelude::*;
use serde::Serialize;

use super::local::{singular_series, sqrt_minus_one_mod_squarefree, SingularSeriesValue};
use super::weight::Weight;
use super::DivisorInstance;
use crate::arith::{gcd_i64, inv_mod};
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, ExactSum};

/// Default cap on the estimated number of inner steps.
pub const DEFAULT_WORK_LIMIT: u128 = 200_000_000_000;

/// The class `m4 ≡ residue (mod modulus)` left after eliminating `m2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EliminationClass {
    pub residue: i64,
    pub modulus: i64,
}

/// Solves `m4·(t2·m1 − m3) ≡ k (mod T2·m1)`, or `None` when `g ∤ k`.
pub fn elimination_class(k: i64, t2_mod: u64, t2: u64, m1: i64, m3: i64) -> Option<EliminationClass> {
    let a = t2 as i128 * m1 as i128 - m3 as i128;
    let modulus = t2_mod as i128 * m1 as i128;
    let g = gcd_i64(a.rem_euclid(modulus) as i64, modulus as i64) as i128;
    if (k as i128) % g != 0 {
        return None;
    }
    let m = modulus / g;
    if m == 1 {
        return Some(EliminationClass { residue: 0, modulus: 1 });
    }
    let inv = inv_mod((a / g).rem_euclid(m), m)?;
    let residue = ((k as i128 / g).rem_euclid(m) * inv).rem_euclid(m);
    Some(EliminationClass { residue: residue as i64, modulus: m as i64 })
}

fn first_at_least(lo: i64, residue: i64, modulus: i64) -> i64 {
    lo + (residue - lo).rem_euclid(modulus)
}

/// Upper estimate of the number of inner steps taken by [`correlation_sum_exact`].
pub fn work_estimate(instance: &DivisorInstance) -> Result<u128> {
    let r1 = sqrt_minus_one_mod_squarefree(instance.t1)?.len() as u128;
    let r2 = sqrt_minus_one_mod_squarefree(instance.t2)?.len() as u128;
    let len = |w: &Weight| {
        let (a, b) = w.integer_range();
        (b - a + 1).max(0) as u128
    };
    let n1 = len(&instance.weights[0]);
    let n3 = len(&instance.weights[2]);
    let n4 = len(&instance.weights[3]);
    let m1 = instance.weights[0].support().0.max(1.0) as u128;
    let t2 = instance.t2 as u128;
    let k = instance.k.unsigned_abs() as u128;
    Ok(r1 * r2 * n1 * (n3 / instance.t1 as u128 + 1) * (n4 * k / (t2 * m1) + 1))
}

/// `Σ b1(m1)b2(m2)b3(m3)b4(m4)` over `m1m2 − m3m4 = k`, `T1 | m1² + m3²`, `T2 | m2² + m4²`,
/// enumerated through the elimination classes. Products are formed as `((b1·b2)·b3)·b4`
/// and summed exactly.
pub fn correlation_sum_exact(instance: &DivisorInstance, work_limit: u128) -> Result<f64> {
    let work = work_estimate(instance)?;
    if work > work_limit {
        return Err(Error::TooLarge { work, limit: work_limit });
    }
    let roots1 = sqrt_minus_one_mod_squarefree(instance.t1)?;
    let roots2 = sqrt_minus_one_mod_squarefree(instance.t2)?;
    let [w1, w2, w3, w4] = &instance.weights;
    let (lo1, hi1) = w1.integer_range();
    let (lo2, hi2) = w2.integer_range();
    let (lo3, hi3) = w3.integer_range();
    let (lo4, hi4) = w4.integer_range();
    let table = |w: &Weight, lo: i64, hi: i64| -> Vec<f64> { (lo..=hi).map(|m| w.eval(m as f64)).collect() };
    let b2 = table(w2, lo2, hi2);
    let b3 = table(w3, lo3, hi3);
    let b4 = table(w4, lo4, hi4);
    let k = instance.k;
    let big_t1 = instance.t1 as i64;
    let big_t2 = instance.t2;

    let mut strata = Vec::new();
    for &a in &roots1 {
        for &b in &roots2 {
            for m1 in lo1.max(1)..=hi1 {
                strata.push((a as i64, b, m1));
            }
        }
    }
    let total = strata
        .par_iter()
        .map(|&(a, b, m1)| {
            let mut acc = ExactSum::new();
            let v1 = w1.eval(m1 as f64);
            if v1 == 0.0 {
                return acc;
            }
            let r3 = (a as i128 * m1 as i128).rem_euclid(big_t1 as i128) as i64;
            let mut m3 = first_at_least(lo3.max(1), r3, big_t1);
            while m3 <= hi3 {
                let v3 = b3[(m3 - lo3) as usize];
                if v3 != 0.0 {
                    if let Some(class) = elimination_class(k, big_t2, b, m1, m3) {
                        let mut m4 = first_at_least(lo4.max(1), class.residue, class.modulus);
                        while m4 <= hi4 {
                            let num = m3 as i128 * m4 as i128 + k as i128;
                            if num > 0 && num % m1 as i128 == 0 {
                                let m2 = (num / m1 as i128) as i64;
                                if (lo2..=hi2).contains(&m2) {
                                    let v2 = b2[(m2 - lo2) as usize];
                                    let v4 = b4[(m4 - lo4) as usize];
                                    acc.add(((v1 * v2) * v3) * v4);
                                }
                            }
                            m4 += class.modulus;
                        }
                    }
                }
                m3 += big_t1;
            }
            acc
        })
        .reduce(ExactSum::new, |mut x, y| {
            x.merge(&y);
            x
        });
    Ok(total.value())
}

/// The main-term integral together with its singular series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MainTerm {
    pub value: f64,
    pub integral: f64,
    pub integral_error: f64,
    pub singular_series: SingularSeriesValue,
    /// Set when the product supports do not overlap.
    pub disjoint: bool,
}

fn split_points(lo: f64, hi: f64, candidates: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = candidates.into_iter().filter(|&p| p > lo && p < hi).collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    pts
}

/// `∫ b_a(s) b_b(t/s) ds/s`, integrated in `log s` piece by piece.
pub fn inner_integral(a: &Weight, b: &Weight, t: f64, tol: f64) -> (f64, f64) {
    let (a_lo, a_hi) = a.support();
    let (b_lo, b_hi) = b.support();
    let lo = a_lo.max(t / b_hi);
    let hi = a_hi.min(t / b_lo);
    if !(hi > lo) {
        return (0.0, 0.0);
    }
    let cuts = a.breakpoints().into_iter().chain(b.breakpoints().into_iter().map(|p| t / p));
    let pts = split_points(lo, hi, cuts);
    let mut value = 0.0;
    let mut err = 0.0;
    for w in pts.windows(2) {
        let q = adaptive_simpson(
            |u: f64| {
                let s = u.exp();
                a.eval(s) * b.eval(t / s)
            },
            w[0].ln(),
            w[1].ln(),
            tol,
        );
        value += q.value;
        err += q.error_estimate;
    }
    (value, err)
}

/// `∫ (∫ b1(s)b2(t/s) ds/s)(∫ b3(s)b4(t/s) ds/s) dt` and an error estimate.
pub fn main_term_integral(weights: &[Weight; 4], rel_tol: f64) -> (f64, f64, bool) {
    let [w1, w2, w3, w4] = weights;
    let lo = (w1.support().0 * w2.support().0).max(w3.support().0 * w4.support().0);
    let hi = (w1.support().1 * w2.support().1).min(w3.support().1 * w4.support().1);
    if !(hi > lo) {
        return (0.0, 0.0, true);
    }
    let products = |x: &Weight, y: &Weight| {
        let xs = x.breakpoints();
        let ys = y.breakpoints();
        xs.iter().flat_map(|p| ys.iter().map(move |q| p * q)).collect::<Vec<_>>()
    };
    let mut cuts = products(w1, w2);
    cuts.extend(products(w3, w4));
    let pts = split_points(lo, hi, cuts);
    let ln2sq = std::f64::consts::LN_2 * std::f64::consts::LN_2;
    let inner_tol = rel_tol * 1e-3;
    let mut value = 0.0;
    let mut err = 0.0;
    let inner_err = std::cell::Cell::new(0.0f64);
    for w in pts.windows(2) {
        let tol = rel_tol * ln2sq * (w[1] - w[0]);
        let q = adaptive_simpson(
            |t: f64| {
                let (i, ei) = inner_integral(w1, w2, t, inner_tol);
                let (j, ej) = inner_integral(w3, w4, t, inner_tol);
                inner_err.set(inner_err.get().max(ei * j.abs() + ej * i.abs()));
                i * j
            },
            w[0],
            w[1],
            tol,
        );
        value += q.value;
        err += q.error_estimate + inner_err.get() * (w[1] - w[0]);
        inner_err.set(0.0);
    }
    (value, err, false)
}

pub fn main_term(instance: &DivisorInstance) -> Result<MainTerm> {
    let series = singular_series(instance.k, instance.t1, instance.t2)?;
    let (integral, integral_error, disjoint) = main_term_integral(&instance.weights, 1e-8);
    Ok(MainTerm { value: integral * series.value, integral, integral_error, singular_series: series, disjoint })
}

/// `|lhs − main|/|main|`; zero when both vanish and infinite when only the main term does.
pub fn relative_gap(lhs: f64, main: f64) -> f64 {
    if main == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (lhs - main).abs() / main.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_solves_congruence() {
        for m1 in 1..60i64 {
            for m3 in 1..60i64 {
                for k in [-3i64, 1, 2, 7] {
                    let t2 = 13u64;
                    let tt = 5u64;
                    let modulus = t2 as i64 * m1;
                    let sols: Vec<i64> =
                        (0..modulus).filter(|m4| (m4 * (tt as i64 * m1 - m3) - k).rem_euclid(modulus) == 0).collect();
                    match elimination_class(k, t2, tt, m1, m3) {
                        None => assert!(sols.is_empty()),
                        Some(c) => {
                            let expect: Vec<i64> =
                                (0..modulus).filter(|m4| (m4 - c.residue).rem_euclid(c.modulus) == 0).collect();
                            assert_eq!(sols, expect);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gap_conventions() {
        assert_eq!(relative_gap(0.0, 0.0), 0.0);
        assert!(relative_gap(1.0, 0.0).is_infinite());
        assert!((relative_gap(1.1, 1.0) - 0.1).abs() < 1e-12);
    }
}

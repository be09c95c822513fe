//! Shifted divisor correlations with both pairs of variables restricted to
//! sums of two squares, and the arithmetic around them.
//!
//! ```
//! use sectorlab::divisor::{local_factor_f, sqrt_minus_one_mod_squarefree};
//! use sectorlab::rational::ratio;
//!
//! assert_eq!(local_factor_f(5, 1, 5, 1).unwrap(), ratio(5, 3));
//! assert_eq!(sqrt_minus_one_mod_squarefree(65).unwrap(), vec![8, 18, 47, 57]);
//! ```

mod correlation;
mod kloosterman;
mod local;
mod weight;

use std::collections::BTreeMap;

use serde::Serialize;

pub use correlation::{
    correlation_sum_exact, elimination_class, inner_integral, main_term, main_term_integral, relative_gap,
    work_estimate, EliminationClass, MainTerm, DEFAULT_WORK_LIMIT,
};
pub use kloosterman::{kloosterman_sum, weil_check, KloostermanContext, WeilCheck};
pub use local::{
    local_factor_f, local_factor_g, singular_series, singular_series_by_root_pairs, sqrt_minus_one_mod_squarefree,
    SingularSeriesValue,
};
pub use weight::{smooth_step, Jet, SharpWeight, SmoothWeight, Weight, MAX_ORDER};

use crate::error::{Error, Result};

/// A validated instance of the correlation problem.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorInstance {
    pub x: u64,
    pub k: i64,
    pub t1: u64,
    pub t2: u64,
    pub weights: [Weight; 4],
    pub delta: f64,
}

impl DivisorInstance {
    pub fn new(x: u64, k: i64, t1: u64, t2: u64, weights: [Weight; 4], delta: f64) -> Result<Self> {
        let inst = DivisorInstance { x, k, t1, t2, weights, delta };
        inst.validate()?;
        Ok(inst)
    }

    /// Smooth weights with the standard plateau on `[M_i, 2M_i]`.
    pub fn smooth(x: u64, k: i64, t1: u64, t2: u64, scales: [f64; 4], delta: f64) -> Result<Self> {
        let w = |m: f64| SmoothWeight::standard(m).map(Weight::Smooth);
        Self::new(x, k, t1, t2, [w(scales[0])?, w(scales[1])?, w(scales[2])?, w(scales[3])?], delta)
    }

    /// The same instance with every weight replaced by the indicator of its plateau.
    pub fn with_sharp_weights(&self) -> Self {
        DivisorInstance { weights: self.weights.clone().map(|w| w.plateau_indicator()), ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.x < 2 {
            problems.push(format!("x = {} must be at least 2", self.x));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            problems.push(format!("delta = {} must lie in (0, 1)", self.delta));
        }
        if self.k == 0 {
            problems.push("k must be nonzero".to_string());
        }
        if let Err(e) = local::check_hypotheses(self.k, self.t1, self.t2) {
            problems.push(e.to_string());
        }
        let x = self.x as f64;
        let cap = x.powf(self.delta) * (1.0 + 1e-12);
        for (name, v) in [("|k|", self.k.unsigned_abs()), ("T1", self.t1), ("T2", self.t2)] {
            if v as f64 > cap {
                problems.push(format!("{name} = {v} exceeds x^delta = {:.3}", x.powf(self.delta)));
            }
        }
        let floor = x.powf(1.0 - self.delta) * (1.0 - 1e-12);
        for (i, w) in self.weights.iter().enumerate() {
            let (lo, hi) = w.support();
            if lo < floor || hi > 100.0 * x {
                problems.push(format!(
                    "weight {} support [{lo}, {hi}] leaves [x^(1-delta), 100x] = [{:.3}, {}]",
                    i + 1,
                    x.powf(1.0 - self.delta),
                    100.0 * x
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Precondition(problems.join("; ")))
        }
    }

    /// Parses `key = value` lines. Keys: `x`, `k`, `T1`, `T2`, `M1`..`M4`, `delta`,
    /// and optionally `plateau_lo`, `plateau_hi`, `weight` (`smooth` or `sharp`).
    pub fn from_kv_str(text: &str) -> Result<Self> {
        const KNOWN: [&str; 13] =
            ["x", "k", "T1", "T2", "M1", "M2", "M3", "M4", "delta", "plateau_lo", "plateau_hi", "weight", "name"];
        let mut map = BTreeMap::new();
        let mut problems = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => {
                    let k = k.trim();
                    if !KNOWN.contains(&k) {
                        problems.push(format!("line {}: unknown key {k:?}", n + 1));
                    } else if map.insert(k.to_string(), v.trim().to_string()).is_some() {
                        problems.push(format!("line {}: duplicate key {k:?}", n + 1));
                    }
                }
                None => problems.push(format!("line {}: expected key = value", n + 1)),
            }
        }
        fn get<T: std::str::FromStr>(
            map: &BTreeMap<String, String>,
            key: &str,
            default: Option<T>,
            problems: &mut Vec<String>,
        ) -> Option<T> {
            match map.get(key) {
                Some(v) => match v.parse() {
                    Ok(t) => Some(t),
                    Err(_) => {
                        problems.push(format!("{key}: cannot parse {v:?}"));
                        None
                    }
                },
                None if default.is_some() => default,
                None => {
                    problems.push(format!("missing key {key:?}"));
                    None
                }
            }
        }
        let x = get::<u64>(&map, "x", None, &mut problems);
        let k = get::<i64>(&map, "k", None, &mut problems);
        let t1 = get::<u64>(&map, "T1", Some(1), &mut problems);
        let t2 = get::<u64>(&map, "T2", Some(1), &mut problems);
        let delta = get::<f64>(&map, "delta", None, &mut problems);
        let lo = get::<f64>(&map, "plateau_lo", Some(1.1), &mut problems);
        let hi = get::<f64>(&map, "plateau_hi", Some(1.9), &mut problems);
        let kind = get::<String>(&map, "weight", Some("smooth".into()), &mut problems);
        let scales: Vec<Option<f64>> =
            (1..=4).map(|i| get::<f64>(&map, &format!("M{i}"), None, &mut problems)).collect();
        if !problems.is_empty() {
            return Err(Error::Format(problems.join("; ")));
        }
        let (lo, hi) = (lo.unwrap(), hi.unwrap());
        let mut weights = Vec::with_capacity(4);
        for m in scales.into_iter().map(Option::unwrap) {
            let w = SmoothWeight::new(m, lo, hi)?;
            weights.push(match kind.as_deref() {
                Some("smooth") => Weight::Smooth(w),
                Some("sharp") => Weight::Smooth(w).plateau_indicator(),
                other => return Err(Error::Format(format!("weight: unknown kind {other:?}"))),
            });
        }
        let weights: [Weight; 4] = weights.try_into().expect("four weights");
        Self::new(x.unwrap(), k.unwrap(), t1.unwrap(), t2.unwrap(), weights, delta.unwrap())
    }
}

/// The outcome of comparing the exact left side with the main term.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationCheck {
    pub lhs: f64,
    pub main_term: MainTerm,
    pub relative_gap: f64,
}

pub fn correlation_check(instance: &DivisorInstance, work_limit: u128) -> Result<CorrelationCheck> {
    let lhs = correlation_sum_exact(instance, work_limit)?;
    let main = main_term(instance)?;
    Ok(CorrelationCheck { lhs, relative_gap: relative_gap(lhs, main.value), main_term: main })
}

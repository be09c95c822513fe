//! Exponent pairs in exact rational arithmetic.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{half, ratio, to_f64};

/// A pair `(κ, λ)` with `0 ≤ κ ≤ 1/2 ≤ λ ≤ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactPair {
    pub kappa: BigRational,
    pub lambda: BigRational,
}

impl ExactPair {
    pub fn new(kappa: BigRational, lambda: BigRational) -> Result<Self> {
        let p = ExactPair { kappa, lambda };
        if !p.in_range() {
            return Err(Error::InvalidArgument(format!("({}, {}) violates 0 ≤ κ ≤ 1/2 ≤ λ ≤ 1", p.kappa, p.lambda)));
        }
        Ok(p)
    }

    /// The trivial pair `(0, 1)`.
    pub fn trivial() -> Self {
        ExactPair { kappa: BigRational::zero(), lambda: BigRational::one() }
    }

    pub fn from_ratios(k: (i64, i64), l: (i64, i64)) -> Result<Self> {
        ExactPair::new(ratio(k.0, k.1), ratio(l.0, l.1))
    }

    pub fn in_range(&self) -> bool {
        let h = half();
        !self.kappa.is_negative() && self.kappa <= h && h <= self.lambda && self.lambda <= BigRational::one()
    }

    pub fn b_admissible(&self) -> bool {
        &self.kappa + &self.lambda * BigRational::from_integer(2.into()) >= ratio(3, 2)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.kappa), to_f64(&self.lambda))
    }

    /// Largest denominator among the two coordinates.
    pub fn max_denominator(&self) -> BigInt {
        self.kappa.denom().max(self.lambda.denom()).clone()
    }
}

impl fmt::Display for ExactPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.kappa, self.lambda)
    }
}

/// `(κ, λ) ↦ (κ/(2κ+2), 1/2 + λ/(2κ+2))`.
pub fn a_process(p: &ExactPair) -> ExactPair {
    let d = &p.kappa * BigRational::from_integer(2.into()) + BigRational::from_integer(2.into());
    ExactPair { kappa: &p.kappa / &d, lambda: half() + &p.lambda / &d }
}

/// `(κ, λ) ↦ (λ − 1/2, κ + 1/2)`, defined when `κ + 2λ ≥ 3/2`.
pub fn b_process(p: &ExactPair) -> Result<ExactPair> {
    if !p.b_admissible() {
        return Err(Error::Inadmissible(format!(
            "B needs κ + 2λ ≥ 3/2, but {} + 2·{} = {}",
            p.kappa,
            p.lambda,
            &p.kappa + &p.lambda * BigRational::from_integer(2.into())
        )));
    }
    Ok(ExactPair { kappa: &p.lambda - half(), lambda: &p.kappa + half() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Process {
    A,
    B,
}

/// A word over `{A, B}`, applied to a seed from the rightmost letter.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProcessWord(pub Vec<Process>);

impl ProcessWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn prepend(&self, letter: Process) -> ProcessWord {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(letter);
        v.extend_from_slice(&self.0);
        ProcessWord(v)
    }
}

impl FromStr for ProcessWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                'A' | 'a' => Ok(Process::A),
                'B' | 'b' => Ok(Process::B),
                other => Err(Error::Format(format!("letter {other:?} at position {i} is not A or B"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(ProcessWord)
    }
}

impl fmt::Display for ProcessWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            f.write_str(match p {
                Process::A => "A",
                Process::B => "B",
            })?;
        }
        Ok(())
    }
}

pub fn apply_word(word: &ProcessWord, seed: &ExactPair) -> Result<ExactPair> {
    let mut p = seed.clone();
    for (pos, letter) in word.0.iter().enumerate().rev() {
        p = match letter {
            Process::A => a_process(&p),
            Process::B => b_process(&p).map_err(|e| Error::Inadmissible(format!("letter {pos} of {word}: {e}")))?,
        };
    }
    Ok(p)
}

/// The word of length at most `max_len` minimising `objective`, ties broken by
/// shorter word and then lexicographic order. Repeated pairs are explored once.
pub fn search_optimal<F>(objective: F, max_len: usize, seed: &ExactPair) -> Result<(ProcessWord, ExactPair)>
where
    F: Fn(&ExactPair) -> BigRational,
{
    if max_len > 24 {
        return Err(Error::InvalidArgument(format!("max_len {max_len} exceeds 24")));
    }
    let mut seen: HashSet<ExactPair> = HashSet::new();
    seen.insert(seed.clone());
    let mut best = (objective(seed), ProcessWord::default(), seed.clone());
    let mut frontier = vec![(ProcessWord::default(), seed.clone())];
    for _ in 0..max_len {
        let mut found: HashMap<ExactPair, ProcessWord> = HashMap::new();
        for (word, pair) in &frontier {
            for letter in [Process::A, Process::B] {
                let next = match letter {
                    Process::A => a_process(pair),
                    Process::B => match b_process(pair) {
                        Ok(q) => q,
                        Err(_) => continue,
                    },
                };
                if seen.contains(&next) {
                    continue;
                }
                let w = word.prepend(letter);
                found
                    .entry(next)
                    .and_modify(|cur| {
                        if w < *cur {
                            *cur = w.clone();
                        }
                    })
                    .or_insert(w);
            }
        }
        let mut level: Vec<(ProcessWord, ExactPair)> = found.into_iter().map(|(p, w)| (w, p)).collect();
        level.sort();
        for (w, p) in &level {
            seen.insert(p.clone());
            let v = objective(p);
            if v < best.0 {
                best = (v, w.clone(), p.clone());
            }
        }
        if level.is_empty() {
            break;
        }
        frontier = level;
    }
    Ok((best.1, best.2))
}

/// Named objectives for [`search_optimal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Minimise `κ`.
    Kappa,
    /// Minimise `κ + λ`.
    KappaPlusLambda,
    /// Maximise `(1 − 3κ − λ)/2`.
    SigmaLower,
}

impl Objective {
    pub fn evaluate(self, p: &ExactPair) -> BigRational {
        match self {
            Objective::Kappa => p.kappa.clone(),
            Objective::KappaPlusLambda => &p.kappa + &p.lambda,
            Objective::SigmaLower => -sigma_lower(p),
        }
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa" => Ok(Objective::Kappa),
            "kappa-plus-lambda" => Ok(Objective::KappaPlusLambda),
            "sigma-lower" => Ok(Objective::SigmaLower),
            _ => Err(Error::Format(format!("unknown objective {s:?} (kappa, kappa-plus-lambda, sigma-lower)"))),
        }
    }
}

/// `(1 − 3κ − λ)/2`.
pub fn sigma_lower(p: &ExactPair) -> BigRational {
    (BigRational::one() - &p.kappa * BigRational::from_integer(3.into()) - &p.lambda)
        / BigRational::from_integer(2.into())
}

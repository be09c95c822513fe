//! Large-value exponents, density intervals and the feasibility chains for `C`.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exppair::{sigma_lower, ExactPair};
use crate::rational::{int, ratio};

type Q = BigRational;

/// Decimal constants of the case analysis, held exactly.
pub mod displayed {
    use super::Q;
    use crate::rational::ratio;

    /// Total δ-budget `β + δ` in the amplified case.
    pub fn delta_sum() -> Q {
        ratio(7509, 10_000)
    }

    /// `δ` at `β = 1/2`: `0.7509 − 1/2`.
    pub fn delta_at_half() -> Q {
        ratio(2509, 10_000)
    }

    /// `(3/2)·0.7509 − 1`, the numerator constant of the amplified upper endpoint.
    pub fn numerator_constant() -> Q {
        ratio(12_635, 100_000)
    }

    /// `4·0.7509`.
    pub fn four_delta_sum() -> Q {
        ratio(30_036, 10_000)
    }

    /// `0.12635/2`, the amplified upper endpoint's constant term at `β = 1/2`.
    pub fn upper_constant() -> Q {
        ratio(63_175, 1_000_000)
    }

    /// `2·0.2509`, its `1/A` coefficient at `β = 1/2`.
    pub fn upper_amp_coefficient() -> Q {
        ratio(5018, 10_000)
    }

    /// Rounded σ floor from the first pair.
    pub fn sigma_floor() -> Q {
        ratio(178, 10_000)
    }

    /// Truncation of `1/52`.
    pub fn case3_upper() -> Q {
        ratio(1923, 100_000)
    }

    /// Amplifier length exponent.
    pub fn amplifier() -> Q {
        ratio(141, 10)
    }
}

#[derive(Debug)]
pub struct LargeValueExponents {
    /// `1/(3a/2 − 3) + 8σ`, defined for `a > 2`.
    pub huxley: Result<Q>,
    /// `1/a + 2σ`, defined for `a > 1`.
    pub mvt: Result<Q>,
}

pub fn lvt_exponents(a: &Q, sigma: &Q) -> LargeValueExponents {
    let huxley = if *a > int(2) {
        Ok((a * ratio(3, 2) - int(3)).recip() + sigma * int(8))
    } else {
        Err(Error::Precondition(format!("the Huxley-type exponent requires a > 2, got a = {a}")))
    };
    let mvt = if *a > int(1) {
        Ok(a.recip() + sigma * int(2))
    } else {
        Err(Error::Precondition(format!("the mean-value exponent requires a > 1, got a = {a}")))
    };
    LargeValueExponents { huxley, mvt }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaSource {
    Density1Pair,
    Density1Smooth,
    Density2,
}

/// Which of the two single-polynomial density bounds to use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Density1Variant {
    /// Bound from an exponent pair, valid for `β ≥ 2/5`.
    Pair(ExactPair),
    /// Smooth bound, valid for `β ≥ 2/3`.
    Smooth,
}

/// Endpoints evaluated at `ε = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleSigmaInterval {
    pub lower: Q,
    pub upper: Q,
    /// The lower endpoint carries a positive `ε`-term, so `σ` must exceed it strictly.
    pub lower_strict: bool,
    pub source: SigmaSource,
    pub pair: Option<ExactPair>,
    pub beta: Q,
    pub delta: Option<Q>,
    pub amp: Option<Q>,
}

impl AdmissibleSigmaInterval {
    pub fn is_empty(&self) -> bool {
        self.lower > self.upper || (self.lower_strict && self.lower == self.upper)
    }
}

pub fn density1_sigma_interval(beta: &Q, variant: &Density1Variant) -> Result<AdmissibleSigmaInterval> {
    let (upper, source, pair) = match variant {
        Density1Variant::Pair(p) => {
            if *beta < ratio(2, 5) {
                return Err(Error::Precondition(format!("pair bound needs β ≥ 2/5, got {beta}")));
            }
            if p.kappa.is_zero() {
                return Err(Error::Precondition("pair bound needs κ > 0".into()));
            }
            let (k, l) = (&p.kappa, &p.lambda);
            let num = (k - l + int(1)) / (k * int(2)) * beta - int(1);
            let den = (int(2) + int(2) / k) * beta - int(2);
            (num / den, SigmaSource::Density1Pair, Some(p.clone()))
        }
        Density1Variant::Smooth => {
            if *beta < ratio(2, 3) {
                return Err(Error::Precondition(format!("smooth bound needs β ≥ 2/3, got {beta}")));
            }
            ((beta * ratio(3, 2) - int(1)) / (beta * int(8) - int(2)), SigmaSource::Density1Smooth, None)
        }
    };
    Ok(AdmissibleSigmaInterval {
        lower: Q::zero(),
        upper,
        lower_strict: true,
        source,
        pair,
        beta: beta.clone(),
        delta: None,
        amp: None,
    })
}

pub fn density2_sigma_interval(beta: &Q, delta: &Q, amp: &Q) -> Result<AdmissibleSigmaInterval> {
    if *beta < ratio(2, 5) || *beta >= int(1) {
        return Err(Error::Precondition(format!("amplified bound needs 2/5 ≤ β < 1, got {beta}")));
    }
    if *delta < Q::zero() {
        return Err(Error::Precondition(format!("amplified bound needs δ ≥ 0, got {delta}")));
    }
    if *amp < int(2) {
        return Err(Error::Precondition(format!("amplified bound needs A ≥ 2, got {amp}")));
    }
    let (lower, upper) = amplified_endpoints(beta, delta, amp);
    Ok(AdmissibleSigmaInterval {
        lower,
        upper,
        lower_strict: !delta.is_zero(),
        source: SigmaSource::Density2,
        pair: None,
        beta: beta.clone(),
        delta: Some(delta.clone()),
        amp: Some(amp.clone()),
    })
}

fn amplified_endpoints(beta: &Q, delta: &Q, amp: &Q) -> (Q, Q) {
    let lower = delta / (amp * (int(2) - beta * int(2)));
    let upper = ((beta + delta) * ratio(3, 2) - int(1) - delta * int(4) / amp) / (beta * int(8) - int(2));
    (lower, upper)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    E2,
    E3,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e2" => Ok(Mode::E2),
            "e3" => Ok(Mode::E3),
            _ => Err(Error::Format(format!("mode must be e2 or e3, got {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::E2 => "e2",
            Mode::E3 => "e3",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    fn holds(self, lhs: &Q, rhs: &Q) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub lhs: Q,
    pub relation: Relation,
    pub rhs: Q,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, lhs: Q, relation: Relation, rhs: Q) -> Self {
        let pass = relation.holds(&lhs, &rhs);
        Check { name, lhs, relation, rhs, pass }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseReport {
    pub c: Q,
    pub mode: Mode,
    pub checks: Vec<Check>,
    pub feasible: bool,
}

impl CaseReport {
    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Which exponent pairs feed the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairSet {
    /// `(0.02381, 0.8929)` and `(0.05, 0.825)`, as rounded for use in the chain.
    Rounded,
    /// `(1/42, 25/28)` and `(1/20, 33/40)`.
    Exact,
}

impl PairSet {
    pub fn pairs(self) -> (ExactPair, ExactPair) {
        match self {
            PairSet::Rounded => (
                ExactPair { kappa: ratio(2381, 100_000), lambda: ratio(8929, 10_000) },
                ExactPair { kappa: ratio(5, 100), lambda: ratio(825, 1000) },
            ),
            PairSet::Exact => (
                ExactPair { kappa: ratio(1, 42), lambda: ratio(25, 28) },
                ExactPair { kappa: ratio(1, 20), lambda: ratio(33, 40) },
            ),
        }
    }
}

/// The amplifier exponent `A` of the amplified density bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Amplifier {
    Fixed(Q),
    /// `A = C − 1`.
    TiedToC,
}

/// Free parameters of the chain; the default pins the published choices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainParams {
    pub pairs: PairSet,
    pub delta_sum: Q,
    pub amplifier: Amplifier,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            pairs: PairSet::Rounded,
            delta_sum: displayed::delta_sum(),
            amplifier: Amplifier::Fixed(displayed::amplifier()),
        }
    }
}

/// The ceiling `(1/(3(C−1)/2 − 3))/2` from the large-value exponent at `a = C − 1`.
pub fn large_value_ceiling(c: &Q) -> Result<Q> {
    let a = c - int(1);
    Ok(lvt_exponents(&a, &Q::zero()).huxley? / int(2))
}

/// Evaluates every inequality of the chain at `ε = 0`.
pub fn verify_constant(c: &Q, mode: Mode, params: &ChainParams) -> Result<CaseReport> {
    if *c <= int(2) {
        return Err(Error::Precondition(format!("C must exceed 2, got {c}")));
    }
    if let Amplifier::Fixed(amp) = &params.amplifier {
        if *amp < int(2) {
            return Err(Error::Precondition(format!("amplifier A must be at least 2, got {amp}")));
        }
    }
    let a = c - int(1);
    let mut checks = Vec::new();
    match mode {
        Mode::E3 => {
            let ceiling = lvt_exponents(&displayed::amplifier(), &Q::zero()).huxley?;
            checks.push(Check::new("e3_sparse_exponent", a.recip(), Relation::Lt, ceiling));
        }
        Mode::E2 => {
            checks.push(Check::new("large_value_domain", a.clone(), Relation::Gt, int(2)));
            let ceiling = if a > int(2) { large_value_ceiling(c)? } else { Q::zero() };
            let (pair1, pair2) = params.pairs.pairs();
            let amp = match &params.amplifier {
                Amplifier::Fixed(q) => q.clone(),
                Amplifier::TiedToC => a.clone(),
            };
            let beta = ratio(1, 2);
            let delta = &params.delta_sum - &beta;
            let smooth = density1_sigma_interval(&ratio(3, 4), &Density1Variant::Smooth)?;
            checks.push(Check::new("case1_smooth_upper_vs_ceiling", smooth.upper, Relation::Gt, ceiling.clone()));
            let (lo2, up2) = amplified_endpoints(&beta, &delta, &amp);
            checks.push(Check::new("case2_amplified_lower_vs_pair_floor", lo2, Relation::Lt, sigma_lower(&pair1)));
            checks.push(Check::new("case2_amplified_upper_vs_ceiling", up2, Relation::Gt, ceiling));
            let case3 = density1_sigma_interval(&ratio(2, 3), &Density1Variant::Pair(pair2))?;
            let (amplified_lower, _) = amplified_endpoints(&beta, &delta, &a);
            checks.push(Check::new("case3_pair_upper_vs_amplified_lower", case3.upper, Relation::Gt, amplified_lower));
            checks.push(Check::new("amplifier_exponent", (a * int(2)).recip(), Relation::Le, (amp * int(2)).recip()));
        }
    }
    let feasible = checks.iter().all(|c| c.pass);
    Ok(CaseReport { c: c.clone(), mode, checks, feasible })
}

/// Bisection for the threshold of [`verify_constant`]; the result `C*` is
/// infeasible at `C* − tol` and feasible at `C* + tol`.
pub fn minimal_constant(mode: Mode, tol: &Q, params: &ChainParams) -> Result<Q> {
    if *tol <= Q::zero() {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut lo = int(3);
    let mut hi = int(1000);
    if verify_constant(&lo, mode, params)?.feasible {
        return Err(Error::Precondition("already feasible at C = 3".into()));
    }
    if !verify_constant(&hi, mode, params)?.feasible {
        return Err(Error::Precondition("infeasible up to C = 1000".into()));
    }
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / int(2);
        if verify_constant(&mid, mode, params)?.feasible {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

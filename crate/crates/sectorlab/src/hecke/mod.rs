//! Hecke characters `λ^m(n) = (n/|n|)^{4m}` and the polynomials built from them.

mod experiments;
mod mvt;
mod spectrum;

pub use experiments::{
    phase_derivative, prime_sum_decay_experiment, smooth_sum_experiment, DecayRow, RoughSectorExclusion, SmoothSumRow,
};
pub use mvt::{fejer_majorant, fejer_minorant_holds, large_value_count, mvt_report, MvtReport, FEJER_MINORANT};
pub use spectrum::{hecke_spectrum, read_spectrum_dump, write_spectrum_dump, Spectrum, SpectrumMethod};

use std::collections::BTreeMap;
use std::ops::AddAssign;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{arg_mod_quarter, is_canonical, primitive_of_ray, GaussianInt, WeightedPoint};
use crate::numeric::CompensatedSum;

/// `λ^m(n)`, computed from the argument of the canonical associate.
pub fn lambda_power(n: GaussianInt, m: i64) -> Result<Complex64> {
    Ok(lambda_from_arg(arg_mod_quarter(n)?, m))
}

pub(crate) fn lambda_from_arg(arg: f64, m: i64) -> Complex64 {
    let phase = 4.0 * m.unsigned_abs() as f64 * arg;
    let (s, c) = phase.sin_cos();
    // negative m is the conjugate, so F(−m) = conj F(m) holds exactly
    Complex64::new(c, if m < 0 { -s } else { s })
}

/// Sparse coefficients `a_n` on canonical `n` with `lo ≤ N(n) ≤ hi`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HeckeCoefficientVector {
    pub entries: BTreeMap<GaussianInt, Complex64>,
    pub norm_range: (u64, u64),
}

impl HeckeCoefficientVector {
    pub fn new(entries: BTreeMap<GaussianInt, Complex64>, norm_range: (u64, u64)) -> Result<Self> {
        let (lo, hi) = norm_range;
        for z in entries.keys() {
            if !is_canonical(*z) {
                return Err(Error::InvalidArgument(format!("{z} is not in the first quadrant")));
            }
            let n = z.norm();
            if n < lo as u128 || n > hi as u128 {
                return Err(Error::InvalidArgument(format!("N({z}) = {n} outside [{lo}, {hi}]")));
            }
        }
        Ok(HeckeCoefficientVector { entries, norm_range })
    }

    /// Real coefficients taken from a weighted point set; the range is the hull of the norms.
    pub fn from_points(points: &[WeightedPoint]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for p in points {
            let w = *p.weight.numer() as f64 / *p.weight.denom() as f64;
            *entries.entry(p.z).or_insert(Complex64::new(0.0, 0.0)) += w;
        }
        let lo = entries.keys().map(|z| z.norm() as u64).min().unwrap_or(0);
        let hi = entries.keys().map(|z| z.norm() as u64).max().unwrap_or(0);
        HeckeCoefficientVector::new(entries, (lo, hi))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        let mut s = CompensatedSum::new();
        for a in self.entries.values() {
            s.add(a.norm());
        }
        s.value()
    }

    pub(crate) fn with_args(&self) -> Vec<(f64, Complex64)> {
        self.entries.iter().map(|(z, a)| (arg_mod_quarter(*z).expect("canonical keys are nonzero"), *a)).collect()
    }
}

/// `F(m) = Σ a_n λ^m(n)` with compensated summation.
pub fn hecke_sum(coeffs: &HeckeCoefficientVector, m: i64) -> Complex64 {
    sum_with_args(&coeffs.with_args(), m)
}

pub(crate) fn sum_with_args(terms: &[(f64, Complex64)], m: i64) -> Complex64 {
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    for &(arg, a) in terms {
        let v = a * lambda_from_arg(arg, m);
        re.add(v.re);
        im.add(v.im);
    }
    Complex64::new(re.value(), im.value())
}

/// Moves every weight to the primitive element of its ray, summing within rays.
pub fn primitive_ray_reduction_map<W: Clone + AddAssign>(
    entries: &BTreeMap<GaussianInt, W>,
) -> Result<BTreeMap<GaussianInt, W>> {
    let mut out: BTreeMap<GaussianInt, W> = BTreeMap::new();
    for (z, w) in entries {
        let p = primitive_of_ray(*z)?;
        match out.get_mut(&p) {
            Some(acc) => *acc += w.clone(),
            None => {
                out.insert(p, w.clone());
            }
        }
    }
    Ok(out)
}

pub fn primitive_ray_reduction(coeffs: &HeckeCoefficientVector) -> Result<HeckeCoefficientVector> {
    let entries = primitive_ray_reduction_map(&coeffs.entries)?;
    let lo = entries.keys().map(|z| z.norm() as u64).min().unwrap_or(0);
    let hi = coeffs.norm_range.1;
    Ok(HeckeCoefficientVector { entries, norm_range: (lo.min(coeffs.norm_range.0), hi) })
}

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{hecke_spectrum, primitive_ray_reduction, HeckeCoefficientVector, SpectrumMethod};
use crate::error::{Error, Result};
use crate::gaussian::AngleSpec;
use crate::numeric::ExactSum;
use crate::sector::weighted_pair_sum;

/// Explicit minorant constant: `ĝ(m) ≥ 0.96/(10T)` on `|m| ≤ T`.
pub const FEJER_MINORANT: f64 = 0.96;

/// Fourier coefficient of `g(x) = max(1 − 10T‖x‖, 0)`.
pub fn fejer_majorant(t: u64, m: i64) -> f64 {
    let tt = 10.0 * t as f64;
    if m == 0 {
        return 1.0 / tt;
    }
    let mf = m as f64;
    // 1 − cos θ = 2 sin²(θ/2), stable for small θ
    let s = (PI * mf / tt).sin();
    tt * 2.0 * s * s / (2.0 * PI * PI * mf * mf)
}

/// Checks `ĝ(m) ≥ 0.96/(10T)` for every `|m| ≤ T`.
pub fn fejer_minorant_holds(t: u64) -> bool {
    let floor = FEJER_MINORANT / (10.0 * t as f64);
    (0..=t as i64).all(|m| fejer_majorant(t, m) >= floor)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MvtReport {
    pub t: u64,
    /// `N`, the top of the norm range.
    pub big_n: u64,
    /// `Σ_{|m| ≤ T} |F(m)|²`.
    pub lhs: f64,
    /// `(N + T) Σ' |a'_n|²` over primitive rays.
    pub r1: f64,
    /// `(10T/0.96) Σ |a_{n₁} a_{n₂}|` over pairs within `(π/2)/(10T)`.
    pub r2: f64,
    pub ratio_r1: f64,
    pub ratio_r2: f64,
    pub retries: u32,
}

pub fn mvt_report(coeffs: &HeckeCoefficientVector, t: u64) -> Result<MvtReport> {
    if t == 0 {
        return Err(Error::InvalidArgument("T must be positive".into()));
    }
    let ti = t as i64;
    let spectrum = hecke_spectrum(coeffs, -ti, ti, SpectrumMethod::Direct)?;
    let lhs: ExactSum = spectrum.values.iter().map(|v| v.norm_sqr()).collect();
    let reduced = primitive_ray_reduction(coeffs)?;
    let sq: ExactSum = reduced.entries.values().map(|a| a.norm_sqr()).collect();
    let big_n = coeffs.norm_range.1;
    let r1 = (big_n as f64 + t as f64) * sq.value();
    let pts: Vec<_> = coeffs.entries.iter().map(|(z, a)| (*z, a.norm())).collect();
    let pairs = weighted_pair_sum(&pts, &AngleSpec::fejer_width(t))?;
    let r2 = 10.0 * t as f64 / FEJER_MINORANT * pairs.value;
    let lhs = lhs.value();
    let ratio = |r: f64| if r > 0.0 { lhs / r } else { 0.0 };
    Ok(MvtReport { t, big_n, lhs, r1, r2, ratio_r1: ratio(r1), ratio_r2: ratio(r2), retries: pairs.retries })
}

/// Number of `m ∈ [−T, T]` with `|F(m)| ≥ V`.
pub fn large_value_count(coeffs: &HeckeCoefficientVector, t: u64, v: f64) -> Result<u64> {
    let ti = t as i64;
    let spectrum = hecke_spectrum(coeffs, -ti, ti, SpectrumMethod::Direct)?;
    Ok(spectrum.values.par_iter().filter(|f| f.norm() >= v).count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianInt;
    use num_complex::Complex64;

    #[test]
    fn fejer_examples() {
        for t in [1, 3, 50] {
            assert_eq!(fejer_majorant(t, 0), 1.0 / (10.0 * t as f64));
            assert!((-500..500).all(|m| fejer_majorant(t, m) >= 0.0));
        }
        let total: f64 = (-1_000_000i64..=1_000_000).map(|m| fejer_majorant(2, m)).sum();
        assert!((total - 1.0).abs() < 1e-5, "{total}");
    }

    #[test]
    fn minorant_small_t() {
        assert!((1..=200).all(fejer_minorant_holds));
        assert!(fejer_majorant(10, 10) / (FEJER_MINORANT / 100.0) < 1.01);
    }

    #[test]
    fn single_coefficient_report() {
        let a = Complex64::new(0.3, -0.4);
        let c = HeckeCoefficientVector::new([(GaussianInt::new(4, 1), a)].into(), (1, 17)).unwrap();
        for t in [1u64, 5, 40] {
            let r = mvt_report(&c, t).unwrap();
            let expect_lhs = (2 * t + 1) as f64 * a.norm_sqr();
            assert!((r.lhs - expect_lhs).abs() < 1e-12);
            assert!((r.r2 - 10.0 * t as f64 / 0.96 * a.norm_sqr()).abs() < 1e-12);
            assert!(r.ratio_r2 <= 1.0);
        }
    }

    #[test]
    fn large_value_extremes() {
        let c = HeckeCoefficientVector::new(
            [(GaussianInt::new(4, 1), Complex64::new(1.0, 0.0)), (GaussianInt::new(2, 3), Complex64::new(0.5, 0.0))]
                .into(),
            (1, 17),
        )
        .unwrap();
        assert_eq!(large_value_count(&c, 20, 0.0).unwrap(), 41);
        assert_eq!(large_value_count(&c, 20, 1.5 + 1e-9).unwrap(), 0);
    }
}

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{divisor_count, gcd_u64, inv_mod};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Residues coprime to `c`, their inverses and the table of `e(r/c)`.
#[derive(Clone, Debug)]
pub struct KloostermanContext {
    c: u64,
    units: Vec<(u64, u64)>,
    roots: Vec<Complex64>,
}

impl KloostermanContext {
    pub fn new(c: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::ZeroInput);
        }
        let units = (0..c)
            .filter(|&x| gcd_u64(x, c) == 1)
            .map(|x| {
                let inv = if c == 1 { 0 } else { inv_mod(x as i128, c as i128).expect("unit") as u64 };
                (x, inv)
            })
            .collect();
        let roots = (0..c).map(|r| Complex64::from_polar(1.0, TAU * r as f64 / c as f64)).collect();
        Ok(KloostermanContext { c, units, roots })
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    /// `S(a, b; c)`.
    pub fn sum(&self, a: i64, b: i64) -> Complex64 {
        let c = self.c as i128;
        let a = (a as i128).rem_euclid(c);
        let b = (b as i128).rem_euclid(c);
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for &(x, xinv) in &self.units {
            let r = (a * x as i128 + b * xinv as i128).rem_euclid(c) as usize;
            re.add(self.roots[r].re);
            im.add(self.roots[r].im);
        }
        Complex64::new(re.value(), im.value())
    }

    pub fn weil_check(&self, a: i64, b: i64) -> WeilCheck {
        let value = self.sum(a, b);
        let g = gcd_u64(gcd_u64(a.unsigned_abs(), b.unsigned_abs()), self.c);
        let bound = divisor_count(self.c) as f64 * (g as f64).sqrt() * (self.c as f64).sqrt();
        let abs = value.norm();
        WeilCheck { a, b, c: self.c, value_abs: abs, bound, pass: abs <= bound * (1.0 + 1e-12) + 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeilCheck {
    pub a: i64,
    pub b: i64,
    pub c: u64,
    pub value_abs: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `Σ_{x mod c, (x, c) = 1} e((ax + b·x̄)/c)`.
pub fn kloosterman_sum(a: i64, b: i64, c: u64) -> Result<Complex64> {
    Ok(KloostermanContext::new(c)?.sum(a, b))
}

/// `|S(a, b; c)| ≤ τ(c)·gcd(a, b, c)^{1/2}·c^{1/2}`.
pub fn weil_check(a: i64, b: i64, c: u64) -> Result<WeilCheck> {
    Ok(KloostermanContext::new(c)?.weil_check(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::euler_phi;

    #[test]
    fn small_values() {
        let s = kloosterman_sum(1, 1, 5).unwrap();
        let expect = 2.0 + 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
        assert!((s.re - expect).abs() < 1e-12 && s.im.abs() < 1e-12);
        assert!((s.re - 0.381_966).abs() < 1e-5);
        assert_eq!(kloosterman_sum(7, 3, 1).unwrap(), Complex64::new(1.0, 0.0));
        for c in 1..50 {
            let s = kloosterman_sum(0, 0, c).unwrap();
            assert!((s.re - euler_phi(c) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn sums_are_real() {
        for c in 1..60 {
            for a in -3..4 {
                let s = kloosterman_sum(a, 2, c).unwrap();
                assert!(s.im.abs() < 1e-9);
                assert!(weil_check(a, 2, c).unwrap().pass);
            }
        }
    }
}

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{sum_with_args, HeckeCoefficientVector};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpectrumMethod {
    Direct,
    /// Angles rounded to the centres of `2^bits` cells of `[0, π/2)`.
    Binned {
        bits: u32,
        #[serde(skip_serializing_if = "Option::is_none")]
        target_error: Option<f64>,
    },
}

impl SpectrumMethod {
    /// The default binning of `2^22` cells.
    pub fn binned() -> Self {
        SpectrumMethod::Binned { bits: 22, target_error: None }
    }
}

/// `F(m)` for `m_lo ≤ m ≤ m_hi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub m_lo: i64,
    pub m_hi: i64,
    pub values: Vec<Complex64>,
    pub method: SpectrumMethod,
    /// Bound on `|F(m) − value|` over the whole range; zero for the direct method.
    pub bin_error_bound: f64,
}

impl Spectrum {
    pub fn get(&self, m: i64) -> Option<Complex64> {
        if m < self.m_lo || m > self.m_hi {
            return None;
        }
        self.values.get((m - self.m_lo) as usize).copied()
    }

    pub fn ms(&self) -> impl Iterator<Item = i64> {
        self.m_lo..=self.m_hi
    }
}

const MAX_BITS: u32 = 30;

fn binned_bound(l1: f64, max_m: u64, bits: u32, max_bin_count: usize) -> f64 {
    let cells = (1u64 << bits) as f64;
    // |4mα − 4mα'| ≤ 4|m|·(half a cell) = π|m|/2^bits
    let lipschitz = l1 * (PI * max_m as f64 / cells).min(2.0);
    let rounding = (3 * bits as usize + max_bin_count + 16) as f64 * f64::EPSILON * l1;
    lipschitz + rounding
}

pub fn hecke_spectrum(
    coeffs: &HeckeCoefficientVector,
    m_lo: i64,
    m_hi: i64,
    method: SpectrumMethod,
) -> Result<Spectrum> {
    if m_lo > m_hi {
        return Err(Error::InvalidArgument(format!("empty m range [{m_lo}, {m_hi}]")));
    }
    let len = (m_hi as i128 - m_lo as i128 + 1) as u128;
    if len > 1 << 28 {
        return Err(Error::TooLarge { work: len, limit: 1 << 28 });
    }
    let terms = coeffs.with_args();
    match method {
        SpectrumMethod::Direct => {
            let values = (m_lo..=m_hi).into_par_iter().map(|m| sum_with_args(&terms, m)).collect();
            Ok(Spectrum { m_lo, m_hi, values, method, bin_error_bound: 0.0 })
        }
        SpectrumMethod::Binned { bits, target_error } => {
            if !(1..=MAX_BITS).contains(&bits) {
                return Err(Error::InvalidArgument(format!("bits must lie in 1..={MAX_BITS}, got {bits}")));
            }
            let cells = 1usize << bits;
            let mut bins = vec![Complex64::new(0.0, 0.0); cells];
            let mut counts = vec![0usize; cells];
            for &(arg, a) in &terms {
                let j = ((arg / FRAC_PI_2 * cells as f64) as usize).min(cells - 1);
                bins[j] += a;
                counts[j] += 1;
            }
            let l1 = coeffs.l1_norm();
            let max_m = m_lo.unsigned_abs().max(m_hi.unsigned_abs());
            let max_count = counts.iter().copied().max().unwrap_or(0);
            let bound = binned_bound(l1, max_m, bits, max_count);
            if let Some(target) = target_error {
                if bound > target {
                    let required = (bits..=MAX_BITS)
                        .find(|&b| binned_bound(l1, max_m, b, max_count) <= target)
                        .unwrap_or(MAX_BITS + 1);
                    return Err(Error::InsufficientBins { required, given: bits });
                }
            }
            // Σ_j S_j e(mj/2^b), then the half-cell phase e(m/2^{b+1})
            FftPlanner::<f64>::new().plan_fft_inverse(cells).process(&mut bins);
            let values = (m_lo..=m_hi)
                .map(|m| {
                    let k = m.rem_euclid(cells as i64) as usize;
                    let half = PI * (m as f64) / cells as f64;
                    bins[k] * Complex64::from_polar(1.0, half)
                })
                .collect();
            Ok(Spectrum { m_lo, m_hi, values, method, bin_error_bound: bound })
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DumpHeader {
    format: String,
    m_lo: i64,
    m_hi: i64,
    method: SpectrumMethod,
    bin_error_bound: f64,
    count: usize,
}

const DUMP_FORMAT: &str = "sectorlab-spectrum-1";

/// One JSON header line, then `(re, im)` as little-endian `f64` pairs.
pub fn write_spectrum_dump(path: &Path, spectrum: &Spectrum) -> Result<()> {
    let header = DumpHeader {
        format: DUMP_FORMAT.into(),
        m_lo: spectrum.m_lo,
        m_hi: spectrum.m_hi,
        method: spectrum.method,
        bin_error_bound: spectrum.bin_error_bound,
        count: spectrum.values.len(),
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &header).map_err(|e| Error::Format(e.to_string()))?;
    w.write_all(b"\n")?;
    for v in &spectrum.values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectrum_dump(path: &Path) -> Result<Spectrum> {
    let mut r = BufReader::new(File::open(path)?);
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line)?;
    let header: DumpHeader =
        serde_json::from_slice(&line).map_err(|e| Error::Format(format!("spectrum header: {e}")))?;
    if header.format != DUMP_FORMAT {
        return Err(Error::Format(format!("unknown spectrum format {:?}", header.format)));
    }
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != 16 * header.count {
        return Err(Error::Format(format!("expected {} records, found {} bytes", header.count, body.len())));
    }
    let f = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8 bytes"));
    let values = body.chunks_exact(16).map(|c| Complex64::new(f(&c[..8]), f(&c[8..]))).collect();
    Ok(Spectrum {
        m_lo: header.m_lo,
        m_hi: header.m_hi,
        values,
        method: header.method,
        bin_error_bound: header.bin_error_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianInt;

    fn fixture() -> HeckeCoefficientVector {
        let entries = (1..40i64)
            .flat_map(|a| (0..40i64).map(move |b| (a, b)))
            .map(|(a, b)| (GaussianInt::new(a, b), Complex64::new(1.0 / (a * a + b * b) as f64, (a - b) as f64 / 1e4)))
            .collect();
        HeckeCoefficientVector::new(entries, (1, 3042)).unwrap()
    }

    #[test]
    fn zero_frequency_is_total() {
        let c = fixture();
        let s = hecke_spectrum(&c, 0, 0, SpectrumMethod::Direct).unwrap();
        let total: Complex64 = c.entries.values().sum();
        assert!((s.values[0] - total).norm() < 1e-12);
    }

    #[test]
    fn empty_coefficients_give_zero() {
        let c = HeckeCoefficientVector::default();
        let s = hecke_spectrum(&c, -3, 3, SpectrumMethod::binned()).unwrap();
        assert!(s.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn binned_within_certificate() {
        let c = fixture();
        let d = hecke_spectrum(&c, -300, 300, SpectrumMethod::Direct).unwrap();
        let b = hecke_spectrum(&c, -300, 300, SpectrumMethod::Binned { bits: 16, target_error: None }).unwrap();
        let dev = d.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(dev <= b.bin_error_bound, "{dev} > {}", b.bin_error_bound);
    }

    #[test]
    fn insufficient_bits_reported() {
        let c = fixture();
        let err = hecke_spectrum(&c, 0, 1000, SpectrumMethod::Binned { bits: 8, target_error: Some(0.1) }).unwrap_err();
        match err {
            Error::InsufficientBins { required, given } => {
                assert_eq!(given, 8);
                assert!(required > 8);
                assert!(hecke_spectrum(
                    &c,
                    0,
                    1000,
                    SpectrumMethod::Binned { bits: required, target_error: Some(0.1) }
                )
                .is_ok());
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn dump_roundtrip() {
        let c = fixture();
        let s = hecke_spectrum(&c, -5, 5, SpectrumMethod::Direct).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        write_spectrum_dump(&path, &s).unwrap();
        assert_eq!(read_spectrum_dump(&path).unwrap(), s);
    }
}

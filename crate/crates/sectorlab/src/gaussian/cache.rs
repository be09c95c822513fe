//! Binary sieve cache: magic `GPRIMES1`, `lo` and `hi` as little-endian `u64`,
//! then one `(re: i64, im: i64)` little-endian record per prime.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::GaussianInt;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"GPRIMES1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeCache {
    pub lo: u64,
    pub hi: u64,
    pub primes: Vec<GaussianInt>,
}

pub fn write_prime_cache(path: &Path, cache: &PrimeCache) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&cache.lo.to_le_bytes())?;
    w.write_all(&cache.hi.to_le_bytes())?;
    for z in &cache.primes {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_prime_cache(path: &Path) -> Result<PrimeCache> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.len() < 24 || &bytes[..8] != MAGIC {
        return Err(Error::Format(format!("{} is not a GPRIMES1 cache", path.display())));
    }
    let body = &bytes[24..];
    if body.len() % 16 != 0 {
        return Err(Error::Format(format!("{} has a truncated record", path.display())));
    }
    let word = |b: &[u8]| i64::from_le_bytes(b.try_into().expect("8 bytes"));
    let primes = body.chunks_exact(16).map(|r| GaussianInt::new(word(&r[..8]), word(&r[8..]))).collect();
    Ok(PrimeCache { lo: word(&bytes[8..16]) as u64, hi: word(&bytes[16..24]) as u64, primes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.bin");
        let cache = PrimeCache { lo: 2, hi: 25, primes: super::super::gaussian_primes_by_norm(2, 25).unwrap() };
        write_prime_cache(&path, &cache).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 24 + 16 * 8);
        assert_eq!(read_prime_cache(&path).unwrap(), cache);
        std::fs::write(&path, b"GPRIMES0........").unwrap();
        assert!(read_prime_cache(&path).is_err());
    }
}

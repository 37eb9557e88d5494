//! Binary caches for sieve tables ("PSLT") and spectra ("PSSP").
//!
//! Layout, little-endian throughout:
//!   PSLT: magic "PSLT", version u16, L u64, then L f64 values Lambda(1..L).
//!   PSSP: magic "PSSP", version u16, N u64, then 2N f64 (re, im) pairs.
//!
//! A cache hit requires an exact (magic, version, length) match; anything
//! else - truncation, bad magic, version skew - is treated as a miss and
//! the artifact is rebuilt. Corrupted files are never trusted.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::Result;
use crate::sieve::{self, LambdaTable};
use crate::spectrum::{self, Spectrum};

pub const LAMBDA_MAGIC: &[u8; 4] = b"PSLT";
pub const LAMBDA_VERSION: u16 = 1;
pub const SPECTRUM_MAGIC: &[u8; 4] = b"PSSP";
pub const SPECTRUM_VERSION: u16 = 1;

pub fn lambda_cache_path(dir: &Path, limit: u64) -> PathBuf {
    dir.join(format!("lambda_{limit}.pslt"))
}

pub fn spectrum_cache_path(dir: &Path, n: u64) -> PathBuf {
    dir.join(format!("spectrum_{n}.pssp"))
}

pub fn write_lambda_cache(path: &Path, table: &LambdaTable) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(LAMBDA_MAGIC)?;
    w.write_all(&LAMBDA_VERSION.to_le_bytes())?;
    w.write_all(&table.limit().to_le_bytes())?;
    for &v in table.lambda_values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Returns Some(table) only on an exact-match, fully readable cache file.
pub fn read_lambda_cache(path: &Path, limit: u64) -> Option<LambdaTable> {
    let mut r = BufReader::new(File::open(path).ok()?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).ok()?;
    if &magic != LAMBDA_MAGIC {
        return None;
    }
    let mut v2 = [0u8; 2];
    r.read_exact(&mut v2).ok()?;
    if u16::from_le_bytes(v2) != LAMBDA_VERSION {
        return None;
    }
    let mut v8 = [0u8; 8];
    r.read_exact(&mut v8).ok()?;
    if u64::from_le_bytes(v8) != limit {
        return None;
    }
    let mut values = vec![0.0f64; limit as usize + 1];
    let mut buf = [0u8; 8];
    for slot in values[1..].iter_mut() {
        r.read_exact(&mut buf).ok()?;
        *slot = f64::from_le_bytes(buf);
    }
    // Trailing garbage also counts as corruption.
    if r.read(&mut buf).ok()? != 0 {
        return None;
    }
    Some(LambdaTable::from_values(limit, values))
}

/// Fetches the table from `dir` or builds it and populates the cache.
pub fn lambda_table_cached(dir: Option<&Path>, limit: u64) -> Result<LambdaTable> {
    if let Some(dir) = dir {
        let path = lambda_cache_path(dir, limit);
        if let Some(table) = read_lambda_cache(&path, limit) {
            return Ok(table);
        }
        let table = sieve::build_lambda_table(limit)?;
        write_lambda_cache(&path, &table)?;
        return Ok(table);
    }
    sieve::build_lambda_table(limit)
}

pub fn write_spectrum_cache(path: &Path, s: &Spectrum) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(SPECTRUM_MAGIC)?;
    w.write_all(&SPECTRUM_VERSION.to_le_bytes())?;
    w.write_all(&s.n().to_le_bytes())?;
    for z in s.coeffs() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectrum_cache(path: &Path, n: u64) -> Option<Spectrum> {
    let mut r = BufReader::new(File::open(path).ok()?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).ok()?;
    if &magic != SPECTRUM_MAGIC {
        return None;
    }
    let mut v2 = [0u8; 2];
    r.read_exact(&mut v2).ok()?;
    if u16::from_le_bytes(v2) != SPECTRUM_VERSION {
        return None;
    }
    let mut v8 = [0u8; 8];
    r.read_exact(&mut v8).ok()?;
    if u64::from_le_bytes(v8) != n {
        return None;
    }
    let mut coeffs = Vec::with_capacity(n as usize);
    let mut buf = [0u8; 8];
    for _ in 0..n {
        r.read_exact(&mut buf).ok()?;
        let re = f64::from_le_bytes(buf);
        r.read_exact(&mut buf).ok()?;
        let im = f64::from_le_bytes(buf);
        coeffs.push(Complex64::new(re, im));
    }
    if r.read(&mut buf).ok()? != 0 {
        return None;
    }
    Some(Spectrum::from_coeffs(coeffs))
}

/// Fetches the spectrum from `dir` or computes it (fast path) and caches it.
pub fn spectrum_cached(dir: Option<&Path>, table: &LambdaTable, n: u64) -> Result<Spectrum> {
    if let Some(dir) = dir {
        let path = spectrum_cache_path(dir, n);
        if let Some(s) = read_spectrum_cache(&path, n) {
            return Ok(s);
        }
        let s = spectrum::lambda_hat(table, n)?;
        write_spectrum_cache(&path, &s)?;
        return Ok(s);
    }
    spectrum::lambda_hat(table, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Seek;

    #[test]
    fn lambda_roundtrip_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let t = sieve::build_lambda_table(1000).unwrap();
        let path = lambda_cache_path(dir.path(), 1000);
        write_lambda_cache(&path, &t).unwrap();
        let back = read_lambda_cache(&path, 1000).unwrap();
        assert_eq!(t.lambda_values(), back.lambda_values());
    }

    #[test]
    fn mismatched_length_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let t = sieve::build_lambda_table(100).unwrap();
        let path = lambda_cache_path(dir.path(), 100);
        write_lambda_cache(&path, &t).unwrap();
        assert!(read_lambda_cache(&path, 101).is_none());
    }

    #[test]
    fn corrupted_magic_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let t = sieve::build_lambda_table(50).unwrap();
        let path = lambda_cache_path(dir.path(), 50);
        write_lambda_cache(&path, &t).unwrap();
        {
            let mut f = std::fs::OpenOptions::new().write(true).open(&path).unwrap();
            f.rewind().unwrap();
            f.write_all(b"XXXX").unwrap();
        }
        assert!(read_lambda_cache(&path, 50).is_none());
        // The cached entry point must rebuild and repair the file.
        let rebuilt = lambda_table_cached(Some(dir.path()), 50).unwrap();
        assert_eq!(rebuilt.lambda_values(), t.lambda_values());
        assert!(read_lambda_cache(&path, 50).is_some());
    }

    #[test]
    fn truncated_file_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let t = sieve::build_lambda_table(64).unwrap();
        let path = lambda_cache_path(dir.path(), 64);
        write_lambda_cache(&path, &t).unwrap();
        let len = std::fs::metadata(&path).unwrap().len();
        let f = std::fs::OpenOptions::new().write(true).open(&path).unwrap();
        f.set_len(len - 8).unwrap();
        assert!(read_lambda_cache(&path, 64).is_none());
    }

    #[test]
    fn spectrum_roundtrip_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let t = sieve::build_lambda_table(128).unwrap();
        let s = spectrum::lambda_hat(&t, 128).unwrap();
        let path = spectrum_cache_path(dir.path(), 128);
        write_spectrum_cache(&path, &s).unwrap();
        let back = read_spectrum_cache(&path, 128).unwrap();
        assert_eq!(s.coeffs(), back.coeffs());
    }
}

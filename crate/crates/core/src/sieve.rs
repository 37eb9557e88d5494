//! Segmented sieve producing exact von Mangoldt values Lambda(n) and
//! Chebyshev sums psi(x) = sum_{n <= x} Lambda(n).
//!
//! Lambda(n) = log p when n = p^j for a prime p, else 0 (natural log).
//! log p is computed once per prime and reused for every power of p, so
//! Lambda(p^j) == Lambda(p) holds bit-exactly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kahan::Kahan;

/// Default cap on table length (number of f64 entries).
pub const DEFAULT_MEMORY_BUDGET: u64 = 200_000_000;

/// Default segment size in entries; fits comfortably in L1/L2.
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 16;

/// Exact von Mangoldt values over 1..=limit.
#[derive(Clone, Debug)]
pub struct LambdaTable {
    limit: u64,
    /// values[n] = Lambda(n); index 0 is unused and holds 0.
    values: Vec<f64>,
}

/// Construction options for [`build_lambda_table_with`].
#[derive(Clone, Copy, Debug)]
pub struct SieveOptions {
    pub segment_size: usize,
    pub memory_budget: u64,
    pub parallel: bool,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions {
            segment_size: DEFAULT_SEGMENT_SIZE,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            parallel: true,
        }
    }
}

/// Builds the Lambda table for 1..=limit with default options.
pub fn build_lambda_table(limit: u64) -> Result<LambdaTable> {
    build_lambda_table_with(limit, SieveOptions::default())
}

/// Builds the Lambda table with explicit segmenting and budget.
///
/// The output is bit-identical for any segment size and for serial or
/// parallel construction: every cell is assigned (never accumulated), and
/// log p depends only on p.
pub fn build_lambda_table_with(limit: u64, opts: SieveOptions) -> Result<LambdaTable> {
    if limit < 1 {
        return Err(Error::invalid("sieve limit must be >= 1"));
    }
    if limit > opts.memory_budget {
        return Err(Error::resource(format!(
            "sieve limit {} exceeds memory budget {}",
            limit, opts.memory_budget
        )));
    }
    let seg = opts.segment_size.max(64);
    let n = limit as usize;
    let mut values = vec![0.0f64; n + 1];

    let root = isqrt(limit);
    let base_primes = simple_primes(root);

    // Primes: mark composites per segment, assign ln(p) to survivors.
    let fill = |offset: usize, chunk: &mut [f64]| {
        let lo = offset as u64; // chunk[i] corresponds to n = lo + i
        let hi = lo + chunk.len() as u64 - 1;
        let mut composite = vec![false; chunk.len()];
        for &p in &base_primes {
            if p * p > hi {
                break;
            }
            let mut start = p * p;
            if start < lo {
                start = lo.div_ceil(p) * p;
            }
            let mut q = start;
            while q <= hi {
                composite[(q - lo) as usize] = true;
                q += p;
            }
        }
        for (i, &c) in composite.iter().enumerate() {
            let v = lo + i as u64;
            if v >= 2 && !c {
                chunk[i] = (v as f64).ln();
            }
        }
    };

    {
        // Skip index 0; segment boundaries are at 1 + k*seg regardless of
        // thread count, so chunk contents are position-determined.
        let body = &mut values[1..];
        if opts.parallel {
            body.par_chunks_mut(seg)
                .enumerate()
                .for_each(|(k, chunk)| fill(1 + k * seg, chunk));
        } else {
            for (k, chunk) in body.chunks_mut(seg).enumerate() {
                fill(1 + k * seg, chunk);
            }
        }
    }

    // Prime powers p^j, j >= 2. Every such base prime is <= sqrt(limit).
    for &p in &base_primes {
        let logp = (p as f64).ln();
        let mut q = p;
        while q <= limit / p {
            q *= p;
            values[q as usize] = logp;
        }
    }

    Ok(LambdaTable { limit, values })
}

impl LambdaTable {
    /// Reassembles a table from raw values (used by the binary cache).
    pub(crate) fn from_values(limit: u64, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len() as u64, limit + 1);
        LambdaTable { limit, values }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Lambda(n); panics if n is out of 1..=limit.
    #[inline]
    pub fn lambda(&self, n: u64) -> f64 {
        self.values[n as usize]
    }

    /// Values Lambda(1), ..., Lambda(limit) as a slice.
    pub fn lambda_values(&self) -> &[f64] {
        &self.values[1..]
    }

    /// Indices n <= limit with Lambda(n) > 0 (the prime powers).
    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &v)| v > 0.0)
            .map(|(i, _)| i as u64)
    }
}

/// psi(x) = sum_{n <= x} Lambda(n), compensated summation in index order.
pub fn chebyshev_psi(table: &LambdaTable, x: f64) -> Result<f64> {
    if !(1.0 <= x && x <= table.limit as f64) {
        return Err(Error::invalid(format!(
            "psi argument {} outside [1, {}]",
            x, table.limit
        )));
    }
    let n = x.floor() as usize;
    let mut acc = Kahan::new();
    for &v in &table.values[1..=n] {
        acc.add(v);
    }
    Ok(acc.value())
}

/// Plain arithmetic mean of values[0..floor(x)], treating values[i] as the
/// sample at n = i + 1.
pub fn cesaro_average(values: &[f64], x: f64) -> Result<f64> {
    if x < 1.0 {
        return Err(Error::invalid("Cesaro average needs x >= 1"));
    }
    let n = x.floor() as usize;
    if n > values.len() {
        return Err(Error::invalid(format!(
            "Cesaro range {} exceeds array length {}",
            n,
            values.len()
        )));
    }
    let mut acc = Kahan::new();
    for &v in &values[..n] {
        acc.add(v);
    }
    Ok(acc.value() / n as f64)
}

/// Integer square root.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

/// Primes up to `limit` by a plain sieve of Eratosthenes.
fn simple_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trial-division oracle for Lambda(n).
    fn lambda_naive(n: u64) -> f64 {
        if n < 2 {
            return 0.0;
        }
        let mut m = n;
        let mut p = 0u64;
        let mut d = 2u64;
        while d * d <= m {
            if m % d == 0 {
                p = d;
                while m % d == 0 {
                    m /= d;
                }
                break;
            }
            d += 1;
        }
        if p == 0 {
            // n itself is prime.
            return (n as f64).ln();
        }
        if m != 1 {
            return 0.0; // two distinct prime factors
        }
        (p as f64).ln()
    }

    #[test]
    fn single_entry_table() {
        let t = build_lambda_table(1).unwrap();
        assert_eq!(t.lambda_values(), &[0.0]);
    }

    #[test]
    fn first_ten_values() {
        let t = build_lambda_table(10).unwrap();
        assert_eq!(t.lambda(1), 0.0);
        assert_eq!(t.lambda(6), 0.0);
        assert_eq!(t.lambda(10), 0.0);
        assert_eq!(t.lambda(8), 2.0f64.ln());
        assert_eq!(t.lambda(9), 3.0f64.ln());
        let positives: Vec<u64> = t.prime_powers().collect();
        assert_eq!(positives, vec![2, 3, 4, 5, 7, 8, 9]);
    }

    #[test]
    fn matches_trial_division_oracle() {
        let t = build_lambda_table(10_000).unwrap();
        for n in 1..=10_000u64 {
            assert_eq!(t.lambda(n), lambda_naive(n), "n = {n}");
        }
    }

    #[test]
    fn prime_power_values_bit_identical() {
        let t = build_lambda_table(100_000).unwrap();
        for (p, max) in [(2u64, 16u32), (3, 10), (5, 7), (7, 5)] {
            let base = t.lambda(p);
            for j in 2..=max {
                let q = p.pow(j);
                if q <= t.limit() {
                    assert_eq!(t.lambda(q), base, "p={p} j={j}");
                }
            }
        }
    }

    #[test]
    fn segment_size_independence() {
        let a = build_lambda_table_with(
            300_000,
            SieveOptions { segment_size: 1 << 10, parallel: false, ..Default::default() },
        )
        .unwrap();
        let b = build_lambda_table_with(
            300_000,
            SieveOptions { segment_size: 1 << 16, parallel: true, ..Default::default() },
        )
        .unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn psi_examples() {
        let t = build_lambda_table(100).unwrap();
        assert_eq!(chebyshev_psi(&t, 1.0).unwrap(), 0.0);
        let psi10 = chebyshev_psi(&t, 10.0).unwrap();
        let expected = 3.0 * 2.0f64.ln() + 2.0 * 3.0f64.ln() + 5.0f64.ln() + 7.0f64.ln();
        assert!((psi10 - expected).abs() < 1e-12, "{psi10} vs {expected}");
        assert!((psi10 - 7.832014180505469).abs() < 1e-12);
    }

    #[test]
    fn psi_monotone() {
        let t = build_lambda_table(500).unwrap();
        let mut prev = 0.0;
        for x in 1..=500 {
            let v = chebyshev_psi(&t, x as f64).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn psi_out_of_range() {
        let t = build_lambda_table(10).unwrap();
        assert!(chebyshev_psi(&t, 0.5).is_err());
        assert!(chebyshev_psi(&t, 11.0).is_err());
    }

    #[test]
    fn cesaro_examples() {
        assert_eq!(cesaro_average(&[5.0], 1.0).unwrap(), 5.0);
        assert_eq!(cesaro_average(&[1.0, 2.0, 3.0], 3.0).unwrap(), 2.0);
        let t = build_lambda_table(10).unwrap();
        let avg = cesaro_average(t.lambda_values(), 10.0).unwrap();
        let psi10 = chebyshev_psi(&t, 10.0).unwrap();
        assert!((avg - psi10 / 10.0).abs() < 1e-15);
        assert!((avg - 0.7832014180505469).abs() < 1e-12);
    }

    #[test]
    fn cesaro_rejects_empty_or_short() {
        assert!(cesaro_average(&[], 1.0).is_err());
        assert!(cesaro_average(&[1.0], 0.2).is_err());
        assert!(cesaro_average(&[1.0, 2.0], 3.0).is_err());
    }

    #[test]
    fn budget_guard() {
        let err = build_lambda_table_with(
            1000,
            SieveOptions { memory_budget: 100, ..Default::default() },
        );
        assert!(matches!(err, Err(Error::ResourceGuard(_))));
    }
}

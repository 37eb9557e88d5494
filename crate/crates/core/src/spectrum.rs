//! Discrete Fourier transform of the von Mangoldt function on Z/NZ and the
//! frequency-side primitives built on it: Parseval residuals, inversion,
//! best rational approximations of xi/N, and band suprema of |Lambda-hat|.
//!
//! Convention: Lambda-hat(xi) = sum_{n in Z/NZ} Lambda(n) e(-xi n / N) with
//! e(x) = exp(2 pi i x). Lambda restricted to {1..N} places Lambda(N) at
//! residue 0; since e(-xi N / N) = 1 the coefficients do not depend on that
//! placement.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::kahan::{Kahan, KahanComplex};
use crate::sieve::LambdaTable;

/// Largest N accepted by the quadratic-time verification transform.
pub const DIRECT_LIMIT: u64 = 4096;

/// DFT coefficients of Lambda on Z/NZ.
#[derive(Clone, Debug)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub(crate) fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        Spectrum { coeffs }
    }

    pub fn n(&self) -> u64 {
        self.coeffs.len() as u64
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// |Lambda-hat(xi)|.
    #[inline]
    pub fn magnitude(&self, xi: u64) -> f64 {
        self.coeffs[xi as usize].norm()
    }

    /// Lambda-hat(0), i.e. psi(N) up to rounding.
    pub fn psi(&self) -> f64 {
        self.coeffs[0].re
    }
}

/// Lambda restricted to {1..N} laid out on residues 0..N-1.
pub fn lambda_signal(table: &LambdaTable, n: u64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid("transform length must be >= 2"));
    }
    if n > table.limit() {
        return Err(Error::invalid(format!(
            "transform length {} exceeds table limit {}",
            n,
            table.limit()
        )));
    }
    let mut signal = Vec::with_capacity(n as usize);
    signal.push(table.lambda(n)); // n = N sits at residue 0
    for j in 1..n {
        signal.push(table.lambda(j));
    }
    Ok(signal)
}

/// Fast-path transform; O(N log N) for arbitrary N, prime or composite.
pub fn lambda_hat(table: &LambdaTable, n: u64) -> Result<Spectrum> {
    let signal = lambda_signal(table, n)?;
    let mut buf: Vec<Complex64> = signal.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n as usize).process(&mut buf);
    Ok(Spectrum { coeffs: buf })
}

/// Verification-mode transform by direct O(N^2) summation with exact
/// integer phase indices. Guarded to N <= 4096.
pub fn lambda_hat_direct(table: &LambdaTable, n: u64) -> Result<Spectrum> {
    if n > DIRECT_LIMIT {
        return Err(Error::resource(format!(
            "direct transform limited to N <= {DIRECT_LIMIT}, got {n}"
        )));
    }
    let signal = lambda_signal(table, n)?;
    let nn = n as usize;
    let twiddle: Vec<Complex64> = (0..nn)
        .map(|r| {
            let angle = -2.0 * std::f64::consts::PI * r as f64 / n as f64;
            Complex64::new(angle.cos(), angle.sin())
        })
        .collect();
    let mut coeffs = Vec::with_capacity(nn);
    for xi in 0..n {
        let mut acc = KahanComplex::new();
        for (j, &v) in signal.iter().enumerate() {
            if v != 0.0 {
                let r = (xi as u128 * j as u128 % n as u128) as usize;
                acc.add(twiddle[r] * v);
            }
        }
        coeffs.push(acc.value());
    }
    Ok(Spectrum { coeffs })
}

/// Relative Parseval residual
/// |sum Lambda(n)^2 - (1/N) sum |Lambda-hat(xi)|^2| / sum Lambda(n)^2.
pub fn verify_parseval(table: &LambdaTable, s: &Spectrum) -> Result<f64> {
    let n = s.n();
    if n > table.limit() {
        return Err(Error::invalid("spectrum length exceeds table limit"));
    }
    let mut time_side = Kahan::new();
    for j in 1..=n {
        let v = table.lambda(j);
        time_side.add(v * v);
    }
    let mut freq_side = Kahan::new();
    for z in s.coeffs() {
        freq_side.add(z.norm_sqr());
    }
    let lhs = time_side.value();
    let rhs = freq_side.value() / n as f64;
    if lhs == 0.0 {
        return Ok((lhs - rhs).abs());
    }
    Ok((lhs - rhs).abs() / lhs)
}

/// Inverse transform (1/N) sum_xi Lambda-hat(xi) e(xi n / N), returned in
/// residue order (index 0 corresponds to Lambda(N)).
pub fn fourier_invert(s: &Spectrum) -> Vec<f64> {
    let n = s.n() as usize;
    let mut buf = s.coeffs.clone();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|z| z.re / n as f64).collect()
}

/// Circular autocorrelation r(d) = sum_n s(n) s(n+d mod N) obtained as the
/// inverse transform of the power spectrum. Also returns the largest
/// imaginary residue as a reality check.
pub fn power_autocorrelation(s: &Spectrum) -> (Vec<f64>, f64) {
    let n = s.n() as usize;
    let mut buf: Vec<Complex64> = s
        .coeffs
        .iter()
        .map(|z| Complex64::new(z.norm_sqr(), 0.0))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let mut max_im: f64 = 0.0;
    let r = buf
        .iter()
        .map(|z| {
            max_im = max_im.max((z.im * scale).abs());
            z.re * scale
        })
        .collect();
    (r, max_im)
}

/// Best rational approximation a/q of xi/N with q bounded by `q_bound`,
/// via continued-fraction convergents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalApprox {
    pub a: u64,
    pub q: u64,
}

impl RationalApprox {
    /// |xi/N - a/q| computed from the exact integer numerator.
    pub fn err(&self, xi: u64, n: u64) -> f64 {
        let num = (xi as i128 * self.q as i128 - self.a as i128 * n as i128).unsigned_abs();
        num as f64 / (n as f64 * self.q as f64)
    }
}

/// Dirichlet approximation: returns coprime a/q with q <= q_bound and
/// |xi/N - a/q| <= 1/(q * q_bound).
pub fn dirichlet_approx(xi: u64, n: u64, q_bound: u64) -> Result<RationalApprox> {
    if n == 0 || xi >= n {
        return Err(Error::invalid("dirichlet_approx needs 0 <= xi < N"));
    }
    if q_bound == 0 || q_bound > n {
        return Err(Error::invalid("dirichlet_approx needs 1 <= Q <= N"));
    }
    // Continued fraction of xi/N: convergents p_k/q_k, stopping before the
    // denominator would exceed the bound.
    let (mut p_prev, mut q_prev) = (1u64, 0u64);
    let (mut p_cur, mut q_cur) = (0u64, 1u64); // a_0 = 0 since xi < N
    let mut d = n;
    let mut rem = xi;
    while rem != 0 {
        let a = d / rem;
        let next_q = match a.checked_mul(q_cur).and_then(|v| v.checked_add(q_prev)) {
            Some(v) => v,
            None => break,
        };
        if next_q > q_bound {
            break;
        }
        let next_p = a * p_cur + p_prev;
        (p_prev, q_prev) = (p_cur, q_cur);
        (p_cur, q_cur) = (next_p, next_q);
        let r = d % rem;
        d = rem;
        rem = r;
    }
    Ok(RationalApprox { a: p_cur, q: q_cur })
}

/// The Vinogradov-shape bound (N/sqrt(q) + N^{4/5} + sqrt(qN)) log^4 N with
/// unit constant. The unspecified constant of the underlying estimate is
/// reported by callers as an empirical ratio, never asserted.
pub fn vinogradov_rhs(n: u64, q: u64) -> f64 {
    let nf = n as f64;
    let qf = q as f64;
    let log4 = nf.ln().powi(4);
    (nf / qf.sqrt() + nf.powf(0.8) + (qf * nf).sqrt()) * log4
}

/// Argmax and max of |Lambda-hat(xi)| over xi in [lo, hi]; ties resolve to
/// the smallest xi.
pub fn band_sup(s: &Spectrum, lo: u64, hi: u64) -> Result<(u64, f64)> {
    if lo < 1 || lo > hi || hi > s.n() - 1 {
        return Err(Error::invalid(format!(
            "band [{lo}, {hi}] must satisfy 1 <= lo <= hi <= N-1"
        )));
    }
    let mut best_xi = lo;
    let mut best = s.magnitude(lo);
    for xi in lo + 1..=hi {
        let v = s.magnitude(xi);
        if v > best {
            best = v;
            best_xi = xi;
        }
    }
    Ok((best_xi, best))
}

//! Extended-precision helpers: error-free f64 transforms, a minimal
//! double-double representation, phase reduction modulo 1, and a thin
//! wrapper over arbitrary-precision floats for the escalation paths.
//!
//! The phase of e(x) only depends on x mod 1, so every exponential in this
//! crate reduces its argument modulo 1 *before* multiplying by 2pi. For
//! arguments assembled from large integers times real factors, plain f64
//! products lose all fractional information; the routines here keep the
//! reduction accurate to a few 1e-16 regardless of magnitude.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

/// Error-free sum: returns (hi, lo) with hi + lo == a + b exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Error-free product: returns (hi, lo) with hi + lo == a * b exactly.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Fractional part x - floor(x), exact for every f64 (values >= 2^53 carry
/// no fractional bits, so 0 is the exact answer there).
#[inline]
pub fn frac_exact(x: f64) -> f64 {
    let f = x - x.floor();
    // x.floor() can round f to exactly 1.0 only for negative x with a tiny
    // fractional part; clamp back into [0, 1).
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Unevaluated double-double value `hi + lo`, |lo| <= ulp(hi)/2.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add_f64(self, x: f64) -> Self {
        let (h, l) = two_sum(self.hi, x);
        Dd::new(h, l + self.lo)
    }

    #[inline]
    pub fn neg(self) -> Self {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

/// Quotient num/den as a double-double (both operands exact f64 integers).
pub fn ratio_dd(num: u64, den: u64) -> Dd {
    debug_assert!(den != 0);
    let n = num as f64;
    let d = den as f64;
    let hi = n / d;
    let (p, pl) = two_prod(hi, d);
    let lo = ((n - p) - pl) / d;
    Dd::new(hi, lo)
}

/// theta * k mod 1 for an integer k, accurate to a few 1e-16.
///
/// Splits k into 32-bit halves so every partial product stays below 2^53
/// and uses (x mod 1) * k == x * k (mod 1) for integer k.
pub fn mod1_f64_times_u64(theta: f64, k: u64) -> f64 {
    let t = frac_exact(theta);
    if k == 0 || t == 0.0 {
        return 0.0;
    }
    let k_hi = (k >> 32) as f64;
    let k_lo = (k & 0xffff_ffff) as f64;
    // t * 2^32 is an exact scaling; its fractional part is exact.
    let t32 = frac_exact(t * 4294967296.0);
    let (h1, l1) = two_prod(t32, k_hi);
    let (h2, l2) = two_prod(t, k_lo);
    frac_exact(frac_exact(h1) + frac_exact(h2) + l1 + l2)
}

/// u * k mod 1 for a double-double u and integer k.
pub fn mod1_dd_times_u64(u: Dd, k: u64) -> f64 {
    frac_exact(mod1_f64_times_u64(u.hi, k) + mod1_f64_times_u64(u.lo, k))
}

/// u * (int_part + frac) mod 1, where int_part + frac is a real number split
/// into its integer part and a double-double fractional part.
pub fn mod1_dd_times_split(u: Dd, int_part: u64, frac: Dd) -> f64 {
    let a = mod1_dd_times_u64(u, int_part);
    let (h, l) = two_prod(u.hi, frac.hi);
    let tail = u.hi * frac.lo + u.lo * frac.hi;
    frac_exact(a + frac_exact(h) + l + tail)
}

const WORD_BITS: i64 = 64;

/// Round an arbitrary-precision float to the nearest f64 (within ~2 ulp).
pub fn big_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((words, _n, sign, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    // Mantissa words are little-endian; value = 0.mantissa * 2^e with the
    // top bit of the last word being the 1/2 place. Two words give 128
    // mantissa bits, plenty for an f64.
    let nw = words.len();
    let e = e as i64;
    let mut v = 0.0f64;
    if nw >= 1 {
        v += words[nw - 1] as f64 * pow2(e - WORD_BITS);
    }
    if nw >= 2 {
        v += words[nw - 2] as f64 * pow2(e - 2 * WORD_BITS);
    }
    if sign == Sign::Neg {
        v = -v;
    }
    v
}

#[inline]
fn pow2(k: i64) -> f64 {
    // Exact for every k that can occur here (|values| fit in f64 range).
    (k as f64).exp2()
}

/// Arbitrary-precision evaluation context. Holds the constants cache and a
/// working precision in bits.
pub struct BigEval {
    pub precision: usize,
    rm: RoundingMode,
    consts: Consts,
}

impl BigEval {
    /// `precision` is in bits; 192 covers ~57 significant decimal digits.
    pub fn new(precision: usize) -> Self {
        BigEval {
            precision,
            rm: RoundingMode::ToEven,
            consts: Consts::new().expect("constants cache"),
        }
    }

    pub fn from_u64(&self, v: u64) -> BigFloat {
        BigFloat::from_u64(v, self.precision)
    }

    pub fn from_f64(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.precision)
    }

    pub fn ratio(&self, num: u64, den: u64) -> BigFloat {
        self.from_u64(num)
            .div(&self.from_u64(den), self.precision, self.rm)
    }

    /// m^c for a positive integer base.
    pub fn pow_u64(&mut self, m: u64, c: &BigFloat) -> BigFloat {
        self.from_u64(m).pow(c, self.precision, self.rm, &mut self.consts)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.precision, self.rm)
    }

    pub fn reciprocal(&self, a: &BigFloat) -> BigFloat {
        a.reciprocal(self.precision, self.rm)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.precision, self.rm)
    }

    /// Fractional part of x in [0, 1).
    pub fn frac(&self, x: &BigFloat) -> BigFloat {
        let fl = x.floor();
        x.sub(&fl, self.precision, self.rm)
    }

    /// Splits a non-negative value into (floor as u64, fractional part).
    /// Returns None if the floor exceeds u64::MAX.
    pub fn split_floor(&self, x: &BigFloat) -> Option<(u64, Dd)> {
        let fl = x.floor();
        let int = big_floor_to_u64(&fl)?;
        let frac = x.sub(&fl, self.precision, self.rm);
        Some((int, self.to_dd(&frac)))
    }

    /// Double-double rounding of an arbitrary-precision value.
    pub fn to_dd(&self, x: &BigFloat) -> Dd {
        let hi = big_to_f64(x);
        let rest = x.sub(&self.from_f64(hi), self.precision, self.rm);
        Dd::new(hi, big_to_f64(&rest))
    }
}

/// Exact u64 value of a non-negative integer-valued BigFloat.
pub fn big_floor_to_u64(x: &BigFloat) -> Option<u64> {
    if x.is_zero() {
        return Some(0);
    }
    if x.is_negative() {
        return None;
    }
    let (words, _n, _s, e, _) = x.as_raw_parts()?;
    let e = e as i64;
    if e > 64 {
        return None; // >= 2^64
    }
    let nw = words.len();
    let mut v: u64 = 0;
    // Integer part = top `e` bits of the mantissa.
    if e > 0 {
        let top = words[nw - 1];
        v = if e >= 64 { top } else { top >> (64 - e) };
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_exact_basics() {
        assert_eq!(frac_exact(2.5), 0.5);
        assert_eq!(frac_exact(-0.25), 0.75);
        assert_eq!(frac_exact(1e300), 0.0);
        assert_eq!(frac_exact(7.0), 0.0);
    }

    #[test]
    fn mod1_product_matches_small_cases() {
        // 0.3 * 7 = 2.1 -> 0.1 (up to f64 representation of 0.3)
        let got = mod1_f64_times_u64(0.3, 7);
        let want = frac_exact(0.3f64 * 7.0);
        assert!((got - want).abs() < 1e-15, "{got} vs {want}");
    }

    #[test]
    fn mod1_product_large_integer() {
        // theta = 1/3, k = 3^20 + 1: theta*k mod 1 == 1/3 exactly in R.
        // Verify against 128-bit rational arithmetic.
        let k: u64 = 3u64.pow(20) + 1;
        let theta = 1.0f64 / 3.0;
        // theta is the f64 nearest 1/3: theta = a/2^54 for an exact integer a.
        let a = (theta * 2f64.powi(54)) as u128; // exact by construction
        let num = (a * k as u128) % (1u128 << 54);
        let want = num as f64 / 2f64.powi(54);
        let got = mod1_f64_times_u64(theta, k);
        assert!((got - want).abs() < 5e-16, "{got} vs {want}");
    }

    #[test]
    fn ratio_dd_reduction_consistency() {
        // (1/3) * 3 mod 1 must land on an integer up to the f64 output error.
        let u = ratio_dd(1, 3);
        let got = mod1_dd_times_u64(u, 3);
        let dist = got.min(1.0 - got);
        assert!(dist < 5e-15, "got {got}");
        // (5/12) * 12^9 mod 1: 5*12^8 is an integer, so the phase is 0.
        let u = ratio_dd(5, 12);
        let got = mod1_dd_times_u64(u, 12u64.pow(9));
        let dist = got.min(1.0 - got);
        assert!(dist < 5e-15, "got {got}");
    }

    #[test]
    fn big_roundtrips() {
        let ev = BigEval::new(192);
        let x = ev.from_f64(1234.56789);
        assert!((big_to_f64(&x) - 1234.56789).abs() < 1e-12);
        let (i, f) = ev.split_floor(&x).unwrap();
        assert_eq!(i, 1234);
        assert!((f.to_f64() - 0.56789).abs() < 1e-12);
    }

    #[test]
    fn big_pow_exact_integer() {
        let mut ev = BigEval::new(192);
        let c = ev.ratio(5, 2);
        let v = ev.pow_u64(4, &c); // 4^2.5 = 32
        let (i, f) = ev.split_floor(&v).unwrap();
        assert_eq!(i, 32);
        assert!(f.to_f64().abs() < 1e-40);
    }

    #[test]
    fn big_floor_to_u64_ranges() {
        let ev = BigEval::new(128);
        for v in [0u64, 1, 2, 1023, u64::MAX / 2, u64::MAX] {
            let x = ev.from_u64(v);
            assert_eq!(big_floor_to_u64(&x), Some(v), "v={v}");
        }
    }
}

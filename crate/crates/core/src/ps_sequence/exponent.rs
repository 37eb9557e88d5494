//! The exponent c of the sequence floor(m^c) and rigorous evaluation of
//! m^c = floor + fractional part.
//!
//! For rational c = p/q the value m^c is pinned down exactly: floor(m^c *
//! 2^s) is the integer q-th root of m^p * 2^(qs), so both the floor and a
//! 96-bit fractional part come out of pure integer arithmetic. m^c can be
//! an exact integer (m = 4, c = 5/2 gives 32), and doubles round across
//! the floor boundary there; the integer route cannot.
//!
//! For other c the exponent is interpreted as the exact rational value of
//! its f64 representation and m^c is evaluated with arbitrary-precision
//! floats, escalating precision when the result sits within 1e-9 of an
//! integer.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::highprec::{BigEval, Dd};

/// Results beyond this bound are a range error (spec'd integer width).
pub const FLOOR_MAX: u64 = i64::MAX as u64;

/// Working precision (bits) for arbitrary-precision power evaluation.
const BIG_BITS: usize = 192;
/// Escalated precision for near-integer disambiguation.
const BIG_BITS_ESCALATED: usize = 384;
/// Fractional-part resolution of the exact rational route.
const FRAC_BITS: u32 = 96;

/// Exponent of a Piatetski-Shapiro sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct PsExponent {
    value: f64,
    rational: Option<(u64, u64)>,
}

impl PsExponent {
    /// Exact rational exponent p/q (reduced internally).
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("exponent denominator must be nonzero"));
        }
        let g = gcd(p, q);
        let (p, q) = (p / g, q / g);
        if p <= q {
            return Err(Error::invalid("exponent must exceed 1"));
        }
        Ok(PsExponent {
            value: p as f64 / q as f64,
            rational: Some((p, q)),
        })
    }

    /// Exponent from a float. Dyadic rationals with small denominators are
    /// recognized and routed through exact integer arithmetic; any other
    /// value is used as the exact rational the f64 represents.
    pub fn real(c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 1.0 {
            return Err(Error::invalid(format!("exponent must be finite and > 1, got {c}")));
        }
        for k in 0..=20u32 {
            let scaled = c * (1u64 << k) as f64;
            if scaled == scaled.floor() && scaled <= 2e12 {
                return PsExponent::rational(scaled as u64, 1u64 << k);
            }
        }
        Ok(PsExponent { value: c, rational: None })
    }

    /// f64 approximation of c (exact when c is dyadic).
    pub fn value(&self) -> f64 {
        self.value
    }

    /// (p, q) in lowest terms when c is an exact rational.
    pub fn rational_form(&self) -> Option<(u64, u64)> {
        self.rational
    }

    pub fn is_integer(&self) -> bool {
        match self.rational {
            Some((_, q)) => q == 1,
            None => self.value == self.value.floor(),
        }
    }

    /// Theorem regime: non-integer c > 2.
    pub fn theorem_regime(&self) -> bool {
        self.value > 2.0 && !self.is_integer()
    }

    /// floor(2c), exact for rational c.
    pub fn floor_2c(&self) -> u64 {
        match self.rational {
            Some((p, q)) => 2 * p / q,
            None => (2.0 * self.value).floor() as u64,
        }
    }

    /// ceil(c - 2), the derivative order fed to the van der Corput bound.
    pub fn vdc_q(&self) -> u32 {
        match self.rational {
            Some((p, q)) => {
                if p <= 2 * q {
                    0
                } else {
                    ((p - 2 * q) + (q - 1)).div_euclid(q) as u32
                }
            }
            None => (self.value - 2.0).ceil().max(0.0) as u32,
        }
    }

    /// The exponent as an arbitrary-precision value.
    pub fn to_big(&self, ev: &BigEval) -> astro_float::BigFloat {
        match self.rational {
            Some((p, q)) => ev.ratio(p, q),
            None => ev.from_f64(self.value),
        }
    }

    /// floor(n^(1/c)), exact for rational c.
    pub fn floor_inverse_pow(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Ok(0);
        }
        match self.rational {
            // n^(q/p): integer p-th root of n^q.
            Some((p, q)) => {
                let root = BigUint::from(n).pow(q as u32).nth_root(p as u32);
                root.to_u64()
                    .ok_or_else(|| Error::range("inverse power exceeds u64".into()))
            }
            None => {
                let mut ev = BigEval::new(BIG_BITS);
                let inv_c = ev.reciprocal(&ev.from_f64(self.value));
                let v = ev.pow_u64(n, &inv_c);
                let (int, _frac) = ev
                    .split_floor(&v)
                    .ok_or_else(|| Error::range("inverse power exceeds u64"))?;
                // Near-integer ambiguity is harmless here: callers size
                // experiments with this, identities never depend on it.
                Ok(int)
            }
        }
    }
}

impl fmt::Display for PsExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rational {
            Some((p, q)) if q == 1 => write!(f, "{p}"),
            Some((p, q)) => write!(f, "{p}/{q}"),
            None => write!(f, "{}", self.value),
        }
    }
}

impl FromStr for PsExponent {
    type Err = Error;

    /// Accepts "p/q", decimal literals ("2.5" becomes exactly 5/2), and
    /// "e" for Euler's number.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("e") {
            return PsExponent::real(std::f64::consts::E);
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad exponent numerator in '{s}'")))?;
            let q: u64 = q
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad exponent denominator in '{s}'")))?;
            return PsExponent::rational(p, q);
        }
        if let Some((int, fract)) = s.split_once('.') {
            if !fract.is_empty() && fract.len() <= 15 && fract.chars().all(|c| c.is_ascii_digit())
            {
                let int: u64 = int
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad exponent '{s}'")))?;
                let num: u64 = fract.parse().unwrap();
                let den = 10u64.pow(fract.len() as u32);
                return PsExponent::rational(int * den + num, den);
            }
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::invalid(format!("bad exponent '{s}'")))?;
        PsExponent::real(v)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// m^c split into floor and a double-double fractional part.
#[derive(Clone, Copy, Debug)]
pub struct PowSplit {
    pub floor: u64,
    pub frac: Dd,
}

/// Exact split for rational c = p/q via integer q-th roots.
fn pow_split_rational(m: u64, p: u64, q: u64) -> Result<PowSplit> {
    let scaled = scaled_pow_floor_rational(m, p, q, FRAC_BITS);
    let int = (&scaled >> FRAC_BITS)
        .to_u64()
        .filter(|&v| v <= FLOOR_MAX)
        .ok_or_else(|| {
            Error::range(format!("floor({m}^{p}/{q}) exceeds 2^63 - 1"))
        })?;
    let mask = (BigUint::from(1u8) << FRAC_BITS) - 1u8;
    let frac_scaled = (scaled & mask)
        .to_u128()
        .expect("fractional part fits 96 bits");
    // frac = frac_scaled / 2^96, split exactly into 53 + 43 bits.
    let hi = (frac_scaled >> 43) as f64 / (1u64 << 53) as f64;
    let lo = (frac_scaled & ((1u128 << 43) - 1)) as f64 / 2f64.powi(96);
    Ok(PowSplit { floor: int, frac: Dd::new(hi, lo) })
}

/// floor(m^(p/q) * 2^shift) by exact integer arithmetic.
pub fn scaled_pow_floor_rational(m: u64, p: u64, q: u64, shift: u32) -> BigUint {
    let base = BigUint::from(m).pow(p as u32) << (shift as u64 * q);
    base.nth_root(q as u32)
}

/// Arbitrary-precision split for non-rational exponents, escalating when
/// the value is within 1e-9 of an integer.
fn pow_split_big(m: u64, c: &PsExponent) -> Result<PowSplit> {
    let split = pow_split_big_at(m, c, BIG_BITS)?;
    let f = split.frac.hi;
    if f < 1e-9 || f > 1.0 - 1e-9 {
        return pow_split_big_at(m, c, BIG_BITS_ESCALATED);
    }
    Ok(split)
}

fn pow_split_big_at(m: u64, c: &PsExponent, bits: usize) -> Result<PowSplit> {
    let mut ev = BigEval::new(bits);
    let cb = c.to_big(&ev);
    let v = ev.pow_u64(m, &cb);
    let (int, frac) = ev
        .split_floor(&v)
        .ok_or_else(|| Error::range(format!("floor({m}^{c}) exceeds u64", c = c)))?;
    if int > FLOOR_MAX {
        return Err(Error::range(format!("floor({m}^{c}) exceeds 2^63 - 1", c = c)));
    }
    Ok(PowSplit { floor: int, frac })
}

/// m^c split into integer and fractional part; exact for rational c.
pub fn pow_split(m: u64, c: &PsExponent) -> Result<PowSplit> {
    if m == 0 {
        return Err(Error::invalid("base must be >= 1"));
    }
    if m == 1 {
        return Ok(PowSplit { floor: 1, frac: Dd::from_f64(0.0) });
    }
    match c.rational_form() {
        Some((p, q)) => pow_split_rational(m, p, q),
        None => pow_split_big(m, c),
    }
}

/// floor(m^c), exactly.
pub fn ps_floor(m: u64, c: &PsExponent) -> Result<u64> {
    Ok(pow_split(m, c)?.floor)
}

/// {m^c} = m^c - floor(m^c), absolute error well below 1e-12; exactly 0
/// when m^c is an integer.
pub fn frac_pow(m: u64, c: &PsExponent) -> Result<f64> {
    Ok(pow_split(m, c)?.frac.to_f64())
}

/// Precomputed splits of m^c for m = 1..=M. Powers of the same exponent
/// are evaluated once and shared by every sum that needs them.
#[derive(Clone, Debug)]
pub struct PowTable {
    entries: Vec<PowSplit>,
}

impl PowTable {
    pub fn build(c: &PsExponent, m_max: u64) -> Result<PowTable> {
        if m_max < 1 {
            return Err(Error::invalid("power table needs M >= 1"));
        }
        let mut entries = Vec::with_capacity(m_max as usize);
        for m in 1..=m_max {
            entries.push(pow_split(m, c)?);
        }
        Ok(PowTable { entries })
    }

    pub fn len(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn split(&self, m: u64) -> PowSplit {
        self.entries[(m - 1) as usize]
    }

    #[inline]
    pub fn floor(&self, m: u64) -> u64 {
        self.entries[(m - 1) as usize].floor
    }

    /// Fractional parts {m^c} as plain f64 atoms.
    pub fn fracs(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.frac.to_f64()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let c: PsExponent = "2.5".parse().unwrap();
        assert_eq!(c.rational_form(), Some((5, 2)));
        let c: PsExponent = "2.1".parse().unwrap();
        assert_eq!(c.rational_form(), Some((21, 10)));
        let c: PsExponent = "7/3".parse().unwrap();
        assert_eq!(c.rational_form(), Some((7, 3)));
        let c: PsExponent = "e".parse().unwrap();
        assert_eq!(c.rational_form(), None);
        assert_eq!(c.value(), std::f64::consts::E);
        assert!("0.5".parse::<PsExponent>().is_err());
        assert!("x".parse::<PsExponent>().is_err());
    }

    #[test]
    fn real_recognizes_dyadic() {
        let c = PsExponent::real(2.5).unwrap();
        assert_eq!(c.rational_form(), Some((5, 2)));
        let c = PsExponent::real(2.25).unwrap();
        assert_eq!(c.rational_form(), Some((9, 4)));
        // f64 2.1 is not 21/10; it stays non-rational.
        let c = PsExponent::real(2.1).unwrap();
        assert_eq!(c.rational_form(), None);
    }

    #[test]
    fn floor_examples() {
        let c = PsExponent::rational(5, 2).unwrap();
        assert_eq!(ps_floor(1, &c).unwrap(), 1);
        assert_eq!(ps_floor(2, &c).unwrap(), 5);
        assert_eq!(ps_floor(3, &c).unwrap(), 15);
        // 4^2.5 = 32 exactly: the escalation edge case.
        assert_eq!(ps_floor(4, &c).unwrap(), 32);
        assert_eq!(frac_pow(4, &c).unwrap(), 0.0);
    }

    #[test]
    fn frac_examples() {
        let c = PsExponent::rational(5, 2).unwrap();
        assert_eq!(frac_pow(1, &c).unwrap(), 0.0);
        let f = frac_pow(2, &c).unwrap();
        assert!((f - 0.6568542494923802).abs() < 1e-13, "{f}");
    }

    #[test]
    fn rational_and_big_paths_agree() {
        let c = PsExponent::rational(5, 2).unwrap();
        for m in [2u64, 3, 4, 10, 99, 100, 1000, 4096, 65536, 99999] {
            let exact = pow_split_rational(m, 5, 2).unwrap();
            let big = pow_split_big(m, &c).unwrap();
            assert_eq!(exact.floor, big.floor, "m={m}");
            assert!(
                (exact.frac.to_f64() - big.frac.to_f64()).abs() < 1e-12,
                "m={m}"
            );
        }
    }

    #[test]
    fn non_rational_exponent() {
        let c = PsExponent::real(std::f64::consts::E).unwrap();
        let v = ps_floor(12, &c).unwrap();
        assert_eq!(v, 858); // 12^e = 858.0622...
        let f = frac_pow(12, &c).unwrap();
        assert!((f - 0.0622004315062451).abs() < 1e-12, "{f}");
    }

    #[test]
    fn overflow_is_range_error() {
        let c = PsExponent::rational(5, 2).unwrap();
        // (2^26)^2.5 = 2^65 overflows the spec'd 2^63 - 1 bound.
        assert!(matches!(ps_floor(1 << 26, &c), Err(Error::Range(_))));
    }

    #[test]
    fn inverse_power_floor() {
        let c = PsExponent::rational(5, 2).unwrap();
        // 1024^(1/2.5) = 2^4 exactly: must not round down to 15.
        assert_eq!(c.floor_inverse_pow(1024).unwrap(), 16);
        assert_eq!(c.floor_inverse_pow(10_000_000).unwrap(), 630);
        let c21 = PsExponent::rational(21, 10).unwrap();
        assert_eq!(c21.floor_inverse_pow(101).unwrap(), 9);
    }

    #[test]
    fn vdc_q_values() {
        assert_eq!(PsExponent::rational(5, 2).unwrap().vdc_q(), 1);
        assert_eq!(PsExponent::rational(21, 10).unwrap().vdc_q(), 1);
        assert_eq!(PsExponent::rational(3, 1).unwrap().vdc_q(), 1);
        assert_eq!(PsExponent::rational(7, 2).unwrap().vdc_q(), 2);
        assert_eq!(PsExponent::real(std::f64::consts::E).unwrap().vdc_q(), 1);
    }

    #[test]
    fn floor_2c_values() {
        assert_eq!(PsExponent::rational(5, 2).unwrap().floor_2c(), 5);
        assert_eq!(PsExponent::rational(21, 10).unwrap().floor_2c(), 4);
    }
}

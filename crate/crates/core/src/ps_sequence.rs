//! Piatetski-Shapiro sequences floor(m^c): exact floors and fractional
//! parts, the exponential sums E_m e(theta floor(m^c)) and E_m e(u m^c),
//! and derivative-test (van der Corput) bounds over dyadic blocks.

mod exponent;

pub use exponent::{
    frac_pow, pow_split, ps_floor, scaled_pow_floor_rational, PowSplit, PowTable, PsExponent,
    FLOOR_MAX,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::highprec::{mod1_dd_times_split, mod1_f64_times_u64, two_sum, Dd};
use crate::kahan::KahanComplex;

/// e(x) = exp(2 pi i x) for a phase already reduced into [0, 1).
#[inline]
pub fn unit_phase(frac: f64) -> Complex64 {
    let angle = std::f64::consts::TAU * frac;
    Complex64::new(angle.cos(), angle.sin())
}

/// Which exponential sum an [`ExpSum`] value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpSumKind {
    /// (1/M) sum e(theta * floor(m^c))
    FloorPhase,
    /// (1/M) sum e(u * m^c)
    PurePower,
}

/// An averaged exponential sum; |value| <= 1 by construction.
#[derive(Clone, Copy, Debug)]
pub struct ExpSum {
    pub m: u64,
    pub parameter: f64,
    pub value: Complex64,
    pub kind: ExpSumKind,
}

/// (1/M) sum_{m=1}^{M} e(theta * floor(m^c)), fixed order, compensated.
pub fn exp_sum_floor(m_max: u64, theta: f64, c: &PsExponent) -> Result<ExpSum> {
    let table = PowTable::build(c, m_max)?;
    Ok(exp_sum_floor_with(&table, m_max, theta))
}

/// Same sum against a prebuilt power table.
pub fn exp_sum_floor_with(table: &PowTable, m_max: u64, theta: f64) -> ExpSum {
    debug_assert!(m_max >= 1 && m_max <= table.len());
    let mut acc = KahanComplex::new();
    for m in 1..=m_max {
        let phase = mod1_f64_times_u64(theta, table.floor(m));
        acc.add(unit_phase(phase));
    }
    ExpSum {
        m: m_max,
        parameter: theta,
        value: acc.value() / m_max as f64,
        kind: ExpSumKind::FloorPhase,
    }
}

/// (1/M) sum e(-(xi/N) floor(m^c)) with exact rational phases: the index
/// xi * (floor(m^c) mod N) mod N never touches floating point.
pub fn exp_sum_floor_ratio(table: &PowTable, m_max: u64, xi: u64, n: u64) -> Complex64 {
    debug_assert!(m_max >= 1 && m_max <= table.len());
    let mut acc = KahanComplex::new();
    for m in 1..=m_max {
        let d = table.floor(m) % n;
        let idx = (xi as u128 * d as u128 % n as u128) as u64;
        // e(-idx/N)
        let angle = -std::f64::consts::TAU * (idx as f64 / n as f64);
        acc.add(Complex64::new(angle.cos(), angle.sin()));
    }
    acc.value() / m_max as f64
}

/// (1/M) sum_{m=1}^{M} e(u * m^c). The phase u*m^c is reduced modulo 1
/// from the split (floor, frac) representation, so accuracy does not decay
/// with the magnitude of m^c.
pub fn exp_sum_pow(m_max: u64, u: f64, c: &PsExponent) -> Result<ExpSum> {
    let table = PowTable::build(c, m_max)?;
    let v = exp_sum_pow_with(&table, m_max, Dd::from_f64(u));
    Ok(ExpSum {
        m: m_max,
        parameter: u,
        value: v,
        kind: ExpSumKind::PurePower,
    })
}

/// Same sum against a prebuilt table, with a double-double u (used when u
/// is assembled as k - xi/N and the rounding of xi/N matters).
pub fn exp_sum_pow_with(table: &PowTable, m_max: u64, u: Dd) -> Complex64 {
    debug_assert!(m_max >= 1 && m_max <= table.len());
    let mut acc = KahanComplex::new();
    for m in 1..=m_max {
        let s = table.split(m);
        let phase = mod1_dd_times_split(u, s.floor, s.frac);
        acc.add(unit_phase(phase));
    }
    acc.value() / m_max as f64
}

/// The van der Corput derivative-test shape
/// F^{1/(2^{q+2}-2)} X^{1-(q+2)/(2^{q+2}-2)} + X/F, with unit constant.
pub fn vdc_bound(f: f64, x: f64, q: u32) -> f64 {
    debug_assert!(f > 0.0 && x >= 1.0);
    let d = (2f64.powi(q as i32 + 2) - 2.0).max(1.0);
    f.powf(1.0 / d) * x.powf(1.0 - (q as f64 + 2.0) / d) + x / f
}

/// One dyadic block of the bound, with its empirical counterpart.
#[derive(Clone, Copy, Debug)]
pub struct VdcBlock {
    pub j: u32,
    /// Block size parameter X = 2^j.
    pub x: f64,
    /// Phase size parameter F = |u| X^c.
    pub f: f64,
    /// vdc_bound(F, X, ceil(c - 2)).
    pub bound: f64,
    /// |sum_{m in [2^j, 2^{j+1}) and m <= M} e(u m^c)| (not normalized).
    pub empirical: f64,
}

/// Per-block data for the dyadic decomposition of sum_{m<=M} e(u m^c):
/// blocks S_j = [2^j, 2^{j+1}) clipped to [1, M], j = 0..floor(log2 M),
/// with X = 2^j and F = |u| (2^j)^c.
pub fn dyadic_vdc_blocks(m_max: u64, u: f64, c: &PsExponent) -> Result<Vec<VdcBlock>> {
    if m_max < 2 {
        return Err(Error::invalid("dyadic decomposition needs M >= 2"));
    }
    if u == 0.0 {
        return Err(Error::invalid("dyadic bound is meaningless at u = 0"));
    }
    let q = c.vdc_q();
    let table = PowTable::build(c, m_max)?;
    let ud = Dd::from_f64(u);
    let jmax = m_max.ilog2();
    let mut blocks = Vec::with_capacity(jmax as usize + 1);
    for j in 0..=jmax {
        let lo = 1u64 << j;
        let hi = ((1u64 << (j + 1)) - 1).min(m_max);
        let x = lo as f64;
        let f = u.abs() * x.powf(c.value());
        let mut acc = KahanComplex::new();
        for m in lo..=hi {
            let s = table.split(m);
            acc.add(unit_phase(mod1_dd_times_split(ud, s.floor, s.frac)));
        }
        blocks.push(VdcBlock {
            j,
            x,
            f,
            bound: vdc_bound(f, x, q),
            empirical: acc.value().norm(),
        });
    }
    Ok(blocks)
}

/// Sum of the per-block bounds; bounds |sum_{m<=M} e(u m^c)| up to the
/// uninstantiated constant of the underlying estimate.
pub fn dyadic_vdc_bound(m_max: u64, u: f64, c: &PsExponent) -> Result<f64> {
    if m_max < 2 {
        return Err(Error::invalid("dyadic bound needs M >= 2"));
    }
    if u == 0.0 {
        return Err(Error::invalid("dyadic bound is meaningless at u = 0"));
    }
    let q = c.vdc_q();
    let jmax = m_max.ilog2();
    let mut total = 0.0;
    for j in 0..=jmax {
        let x = (1u64 << j) as f64;
        let f = u.abs() * x.powf(c.value());
        total += vdc_bound(f, x, q);
    }
    Ok(total)
}

/// How [`u_of_xi`] evaluates the inner exponential sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UMode {
    /// Actual |E_m e((k - xi/N) m^c)| values.
    Empirical,
    /// Each sum replaced by dyadic_vdc_bound / M.
    Bound,
}

/// U(xi) = 1/K + sum_{k=1}^{K} |E_{m<=M} e((-xi/N + k) m^c)| / k.
pub fn u_of_xi(
    xi: u64,
    n: u64,
    m_max: u64,
    k_max: u64,
    c: &PsExponent,
    mode: UMode,
) -> Result<f64> {
    if k_max == 0 {
        return Err(Error::invalid("U(xi) needs K >= 1"));
    }
    if n == 0 {
        return Err(Error::invalid("U(xi) needs N >= 1"));
    }
    let ratio = crate::highprec::ratio_dd(xi, n);
    let mut total = 1.0 / k_max as f64;
    match mode {
        UMode::Empirical => {
            let table = PowTable::build(c, m_max)?;
            for k in 1..=k_max {
                // u = k - xi/N as a double-double.
                let (hi, lo) = two_sum(k as f64, -ratio.hi);
                let u = Dd::new(hi, lo - ratio.lo);
                let v = exp_sum_pow_with(&table, m_max, u).norm();
                total += v / k as f64;
            }
        }
        UMode::Bound => {
            for k in 1..=k_max {
                let u = k as f64 - ratio.hi;
                let v = dyadic_vdc_bound(m_max, u, c)? / m_max as f64;
                total += v / k as f64;
            }
        }
    }
    Ok(total)
}

/// The U(xi) decay exponent of the dyadic estimate: (c - q - 2)/(2^{q+2} - 1).
pub fn u_shape_exponent(c: &PsExponent) -> f64 {
    let q = c.vdc_q() as f64;
    (c.value() - q - 2.0) / (2f64.powf(q + 2.0) - 1.0)
}

//! Numerical workbench for prime-pair correlations with Piatetski-Shapiro
//! shifts floor(m^c): exact von Mangoldt tables, spectra on Z/NZ,
//! exponential sums, Diophantine solution counts, and circle discrepancy,
//! with every identity cross-checked by an independent route.

pub mod cache;
pub mod correlation;
pub mod diophantine;
pub mod discrepancy;
pub mod error;
pub mod highprec;
pub mod kahan;
pub mod ps_sequence;
pub mod sieve;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use ps_sequence::{PsExponent, PowTable};
pub use sieve::LambdaTable;
pub use spectrum::Spectrum;

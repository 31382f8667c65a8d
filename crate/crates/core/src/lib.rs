//! Exact analysis of the weighted-sum Boolean function.
//!
//! The simplified function on `m` variables reads the input bit selected by
//! the weighted index `s(X) = Σ k·x_k mod m`; the original variant uses the
//! least positive residue modulo the smallest prime `p ≥ m` and falls back to
//! `x_1` when that index exceeds `m`.
//!
//! Modules:
//!
//! * [`weighted_sum`]: function specs, pointwise evaluation and Gray-code truth tables.
//! * [`measures`]: weight, sensitivity and average sensitivity.
//! * [`spectrum`]: Walsh–Hadamard spectra, maximal-coefficient tables and the constant ρ.
//! * [`cyclic`]: characters of `Z_m`, subset-sum counts `N(k, b, D)`, character-sum bounds
//!   and zero-sum scans.
//! * [`sieve`]: permutation types, the distinct-coordinate sieve and its generating function.

#![forbid(unsafe_code)]

pub mod cyclic;
mod error;
pub mod measures;
pub mod sieve;
pub mod spectrum;
pub mod weighted_sum;

pub use crate::cyclic::{CountTable, ResidueSet};
pub use crate::error::{Error, Result};
pub use crate::measures::SensitivityReport;
pub use crate::sieve::PermutationType;
pub use crate::spectrum::{Spectrum, SpectrumSummary};
pub use crate::weighted_sum::{BitVector, FunctionSpec, TruthTable, Variant, DEFAULT_MAX_VARS};

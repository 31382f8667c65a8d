//! The simplified and original weighted-sum functions.
//!
//! Both variants store their `m` inputs in a 0-based array. For the
//! simplified function `f`, position `k` holds `x_k` and carries weight `k`.
//! For the original function `g`, position `k` holds the logical variable
//! `x_{k+1}` and carries weight `k + 1`.
//!
//! Truth tables index inputs by an integer whose bit `k` is the value at
//! storage position `k`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};

/// Default upper bound on the number of variables for materialized tables
/// (2^28 bits = 32 MiB packed).
pub const DEFAULT_MAX_VARS: usize = 28;

/// Bits of the index space enumerated by one Gray-code pass.
const CHUNK_BITS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `f(X) = x_{s(X)}`, weights modulo `m`.
    Simplified,
    /// `g(X) = x_{u(X)}` with weights modulo the smallest prime `p ≥ m`.
    Original,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Simplified => f.write_str("f"),
            Variant::Original => f.write_str("g"),
        }
    }
}

/// Which weighted-sum function to evaluate, on how many variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionSpec {
    variant: Variant,
    m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<usize>,
}

impl FunctionSpec {
    pub fn new(variant: Variant, m: usize) -> Result<Self> {
        match variant {
            Variant::Simplified => Self::simplified(m),
            Variant::Original => Self::original(m),
        }
    }

    pub fn simplified(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("m must be at least 1".into()));
        }
        Ok(Self {
            variant: Variant::Simplified,
            m,
            p: None,
        })
    }

    /// The original function, with `p` chosen as the smallest prime `≥ m`.
    pub fn original(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("m must be at least 1".into()));
        }
        Ok(Self {
            variant: Variant::Original,
            m,
            p: Some(smallest_prime_geq(m)),
        })
    }

    /// The original function with an explicit modulus, which must be the
    /// smallest prime not below `m`.
    pub fn original_with_modulus(m: usize, p: usize) -> Result<Self> {
        let spec = Self::original(m)?;
        if spec.p != Some(p) {
            return Err(Error::InvalidInput(format!(
                "modulus {p} is not the smallest prime >= {m}"
            )));
        }
        Ok(spec)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The prime modulus of the original variant.
    pub fn p(&self) -> Option<usize> {
        self.p
    }

    /// Modulus of the weighted sum: `m` for `f`, `p` for `g`.
    pub fn modulus(&self) -> usize {
        self.p.unwrap_or(self.m)
    }

    /// Weight attached to storage position `k`.
    fn position_weight(&self, k: usize) -> usize {
        match self.variant {
            Variant::Simplified => k,
            Variant::Original => k + 1,
        }
    }

    /// Storage position read when the weighted sum has residue `r`.
    fn selected_position(&self, r: usize) -> usize {
        match self.variant {
            Variant::Simplified => r,
            Variant::Original => {
                let u = if r == 0 { self.modulus() } else { r };
                if u <= self.m {
                    u - 1
                } else {
                    0
                }
            }
        }
    }

    pub fn eval(&self, x: &BitVector) -> Result<bool> {
        match self.variant {
            Variant::Simplified => eval_f(self, x),
            Variant::Original => eval_g(self, x),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.p {
            Some(p) => write!(f, "{}(m={}, p={})", self.variant, self.m, p),
            None => write!(f, "{}(m={})", self.variant, self.m),
        }
    }
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Least prime `p ≥ m`.
pub fn smallest_prime_geq(m: usize) -> usize {
    (m.max(2)..).find(|&n| is_prime(n)).expect("primes are unbounded")
}

/// A fixed-length 0/1 input vector in storage order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVector {
    bits: Vec<bool>,
}

impl BitVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(m: usize) -> Self {
        Self { bits: vec![false; m] }
    }

    /// Decodes a truth-table index: position `k` takes bit `k` of `index`.
    pub fn from_index(index: u64, m: usize) -> Self {
        Self {
            bits: (0..m).map(|k| (index >> k) & 1 == 1).collect(),
        }
    }

    pub fn to_index(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &b)| acc | ((b as u64) << k))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, k: usize) -> bool {
        self.bits[k]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// The vector with coordinate `i` flipped.
    pub fn flipped(&self, i: usize) -> Self {
        let mut bits = self.bits.clone();
        bits[i] = !bits[i];
        Self { bits }
    }

    fn expect_len(&self, m: usize) -> Result<()> {
        if self.bits.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                actual: self.bits.len(),
            });
        }
        Ok(())
    }
}

/// Parses a bit string such as `"0110"`, where character `k` is position `k`.
impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| *c != ',' && !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidInput(format!("'{other}' is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `s(X) = Σ_{k=0}^{m-1} k·x_k mod m`.
pub fn weighted_index_s(x: &BitVector, m: usize) -> Result<usize> {
    x.expect_len(m)?;
    Ok(x.bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .fold(0, |acc, (k, _)| (acc + k) % m))
}

/// `u(X) ∈ [1, p]` with `u ≡ Σ_{k=1}^m k·x_k (mod p)`; here `x_k` is storage
/// position `k - 1`.
pub fn weighted_index_u(x: &BitVector, m: usize, p: usize) -> Result<usize> {
    x.expect_len(m)?;
    if p == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    let r = x
        .bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .fold(0, |acc, (k, _)| (acc + k + 1) % p);
    Ok(if r == 0 { p } else { r })
}

pub fn eval_f(spec: &FunctionSpec, x: &BitVector) -> Result<bool> {
    if spec.variant != Variant::Simplified {
        return Err(Error::InvalidInput("eval_f needs the simplified variant".into()));
    }
    let s = weighted_index_s(x, spec.m)?;
    Ok(x.get(s))
}

pub fn eval_g(spec: &FunctionSpec, x: &BitVector) -> Result<bool> {
    let p = match (spec.variant, spec.p) {
        (Variant::Original, Some(p)) => p,
        _ => return Err(Error::InvalidInput("eval_g needs the original variant".into())),
    };
    let u = weighted_index_u(x, spec.m, p)?;
    // Logical x_u lives at storage position u - 1.
    Ok(if u <= spec.m { x.get(u - 1) } else { x.get(0) })
}

/// Maps an input of `g` (storage `k` = `x_{k+1}`) to the input of `f` on
/// which, for prime `m`, both functions agree: `x'_0 = x_m`, `x'_k = x_k`.
pub fn relabel_original_to_simplified(x: &BitVector) -> BitVector {
    let m = x.len();
    if m == 0 {
        return x.clone();
    }
    let mut bits = Vec::with_capacity(m);
    bits.push(x.bits[m - 1]);
    bits.extend_from_slice(&x.bits[..m - 1]);
    BitVector::new(bits)
}

/// Bit-packed table of `2^m` function values.
#[derive(Clone, PartialEq, Eq)]
pub struct TruthTable {
    m: usize,
    words: Vec<u64>,
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruthTable")
            .field("m", &self.m)
            .field("weight", &self.count_ones())
            .finish()
    }
}

impl TruthTable {
    pub fn zeros(m: usize) -> Self {
        let words = (1usize << m).div_ceil(64);
        Self {
            m,
            words: vec![0; words],
        }
    }

    /// Builds a table by evaluating `f` on every index, one at a time.
    pub fn from_fn(m: usize, f: impl Fn(u64) -> bool) -> Self {
        let mut tt = Self::zeros(m);
        for index in 0..tt.len() {
            if f(index) {
                tt.set(index, true);
            }
        }
        tt
    }

    /// Builds a table from a slice of `2^m` values.
    pub fn from_bits(values: &[bool]) -> Result<Self> {
        let len = values.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidInput(format!("table length {len} is not a power of two")));
        }
        let m = len.trailing_zeros() as usize;
        Ok(Self::from_fn(m, |i| values[i as usize]))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of entries, `2^m`.
    pub fn len(&self) -> u64 {
        1u64 << self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Mask of valid bits in each word (all ones unless `m < 6`).
    pub(crate) fn word_mask(&self) -> u64 {
        if self.m >= 6 {
            u64::MAX
        } else {
            (1u64 << (1u64 << self.m)) - 1
        }
    }

    #[inline]
    pub fn get(&self, index: u64) -> bool {
        (self.words[(index >> 6) as usize] >> (index & 63)) & 1 == 1
    }

    pub fn set(&mut self, index: u64, value: bool) {
        let word = &mut self.words[(index >> 6) as usize];
        let bit = 1u64 << (index & 63);
        if value {
            *word |= bit;
        } else {
            *word &= !bit;
        }
    }

    pub fn value_at(&self, x: &BitVector) -> Result<bool> {
        x.expect_len(self.m)?;
        Ok(self.get(x.to_index()))
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn complement(&self) -> Self {
        let mask = self.word_mask();
        Self {
            m: self.m,
            words: self.words.iter().map(|w| !w & mask).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}

pub fn truth_table(spec: &FunctionSpec) -> Result<TruthTable> {
    truth_table_with_cap(spec, DEFAULT_MAX_VARS)
}

/// Materializes all `2^m` values of `spec`.
///
/// The index space is split into blocks of `2^16` inputs sharing their high
/// bits. Each block is walked in Gray-code order so that the weighted sum
/// changes by a single `±weight` per step. Blocks are independent, so the
/// result does not depend on the number of worker threads.
pub fn truth_table_with_cap(spec: &FunctionSpec, max_vars: usize) -> Result<TruthTable> {
    let m = spec.m;
    check_cap("m", m, max_vars)?;
    check_cap("m", m, 63)?;

    let modulus = spec.modulus();
    let add: Vec<usize> = (0..m).map(|k| spec.position_weight(k) % modulus).collect();
    let sub: Vec<usize> = add.iter().map(|&w| (modulus - w) % modulus).collect();
    let select: Vec<u32> = (0..modulus).map(|r| spec.selected_position(r) as u32).collect();

    let low_bits = m.min(CHUNK_BITS);
    let mut tt = TruthTable::zeros(m);
    let words_per_block = (1usize << low_bits).div_ceil(64);

    let fill_block = |block: usize, words: &mut [u64]| {
        let high = (block as u64) << low_bits;
        let mut sum = (low_bits..m)
            .filter(|&k| (high >> k) & 1 == 1)
            .fold(0, |acc, k| (acc + add[k]) % modulus);
        let mut gray = 0u64;
        let mut emit = |gray: u64, sum: usize| {
            let index = high | gray;
            if (index >> select[sum]) & 1 == 1 {
                words[(gray >> 6) as usize] |= 1u64 << (gray & 63);
            }
        };
        emit(0, sum);
        for step in 1u64..(1u64 << low_bits) {
            let k = step.trailing_zeros() as usize;
            gray ^= 1 << k;
            sum += if (gray >> k) & 1 == 1 { add[k] } else { sub[k] };
            if sum >= modulus {
                sum -= modulus;
            }
            emit(gray, sum);
        }
    };

    tt.words
        .par_chunks_mut(words_per_block)
        .enumerate()
        .for_each(|(block, words)| fill_block(block, words));
    Ok(tt)
}

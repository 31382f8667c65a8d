//! Subset sums over the cyclic group `Z_m`.
//!
//! `N(k, b, D)` counts the `k`-element subsets of `D ⊆ Z_m` summing to `b`.
//! Counts are exact (`u128`); character sums are evaluated in double
//! precision.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_cap, Error, Result};
use crate::sieve::{falling_factorial, generalized_binomial, sieve_distinct_sum, symmetric_sieve, TupleSet};

/// Largest `|D|` handled by the counting DP.
pub const MAX_DP_ELEMENTS: usize = 64;
/// Largest `|D|` handled by the `2^n` enumeration oracle.
pub const MAX_BRUTEFORCE_ELEMENTS: usize = 24;
/// Largest `m` for the exhaustive zero-sum scan.
pub const MAX_EXHAUSTIVE_SCAN_M: usize = 16;
/// Largest `m` for the sampled zero-sum scan.
pub const MAX_SAMPLED_SCAN_M: usize = 24;

/// Relative slack applied to every real-valued bound comparison.
pub const BOUND_SLACK: f64 = 1e-9;

/// A subset `D` of `Z_m`, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ResidueSet {
    m: usize,
    members: Vec<usize>,
}

impl ResidueSet {
    pub fn new(m: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("modulus must be positive".into()));
        }
        let mut members: Vec<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&a| a >= m) {
            return Err(Error::InvalidInput(format!("{bad} is not a residue mod {m}")));
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { m, members })
    }

    /// `Z_m`.
    pub fn full(m: usize) -> Result<Self> {
        Self::new(m, 0..m)
    }

    /// `Z_m` minus the given residues.
    pub fn excluding(m: usize, exclude: &[usize]) -> Result<Self> {
        if let Some(&bad) = exclude.iter().find(|&&a| a >= m) {
            return Err(Error::InvalidInput(format!("{bad} is not a residue mod {m}")));
        }
        Self::new(m, (0..m).filter(|a| !exclude.contains(a)))
    }

    /// Builds the set whose members are the set bits of `mask`.
    pub fn from_mask(m: usize, mask: u64) -> Result<Self> {
        Self::new(m, (0..m.min(64)).filter(|&a| (mask >> a) & 1 == 1))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Cardinality `n = |D|`.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.members.binary_search(&a).is_ok()
    }

    pub fn complement(&self) -> Self {
        Self {
            m: self.m,
            members: (0..self.m).filter(|&a| !self.contains(a)).collect(),
        }
    }

    /// `{a + t : a ∈ D}`.
    pub fn translate(&self, t: usize) -> Self {
        Self::new(self.m, self.members.iter().map(|a| (a + t) % self.m)).expect("residues stay in range")
    }
}

/// The additive character `χ_j(a) = e^{2πi·j·a/m}` of `Z_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CharacterIndex {
    m: usize,
    j: usize,
}

impl CharacterIndex {
    pub fn new(m: usize, j: usize) -> Result<Self> {
        if m == 0 || j >= m {
            return Err(Error::InvalidInput(format!("no character {j} of Z_{m}")));
        }
        Ok(Self { m, j })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    /// `m / gcd(j, m)`.
    pub fn order(&self) -> usize {
        self.m / self.j.gcd(&self.m)
    }

    pub fn is_trivial(&self) -> bool {
        self.j == 0
    }

    /// `χ^i`.
    pub fn pow(&self, i: usize) -> Self {
        Self {
            m: self.m,
            j: (self.j * i) % self.m,
        }
    }

    pub fn value(&self, a: usize) -> Complex64 {
        let r = (self.j * (a % self.m)) % self.m;
        if r == 0 {
            return Complex64::new(1.0, 0.0);
        }
        Complex64::from_polar(1.0, 2.0 * PI * r as f64 / self.m as f64)
    }
}

pub fn euler_phi(n: usize) -> usize {
    (1..=n).filter(|&i| i.gcd(&n) == 1).count()
}

pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Smallest prime divisor of `m ≥ 2`.
pub fn smallest_prime_divisor(m: usize) -> Option<usize> {
    (2..=m).find(|d| m.is_multiple_of(*d))
}

/// `s_χ(D) = Σ_{a ∈ D} χ(a)`.
pub fn character_sum(set: &ResidueSet, chi: CharacterIndex) -> Complex64 {
    if chi.is_trivial() {
        return Complex64::new(set.len() as f64, 0.0);
    }
    set.members.iter().map(|&a| chi.value(a)).sum()
}

/// `Φ(D) = max_{χ ≠ χ_0} |s_χ(D)|`.
///
/// For a nontrivial character `s_χ(D) = -s_χ(Z_m \ D)`, so the smaller of the
/// two sets is summed.
pub fn phi_of_d(set: &ResidueSet) -> Result<f64> {
    let m = set.m;
    if m < 2 {
        return Err(Error::InvalidInput("Φ(D) needs m >= 2".into()));
    }
    let small = if set.len() > m / 2 {
        set.complement()
    } else {
        set.clone()
    };
    match small.len() {
        0 => return Ok(0.0),
        1 => return Ok(1.0),
        _ => {}
    }
    Ok((1..m)
        .map(|j| character_sum(&small, CharacterIndex { m, j }).norm())
        .fold(0.0, f64::max))
}

/// Exact counts `N(k, b, D)` for `0 ≤ k ≤ n`, `b ∈ Z_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountTable {
    set: ResidueSet,
    /// Row-major `(n + 1) × m`.
    counts: Vec<u128>,
}

impl CountTable {
    pub fn set(&self) -> &ResidueSet {
        &self.set
    }

    pub fn m(&self) -> usize {
        self.set.m
    }

    pub fn n(&self) -> usize {
        self.set.len()
    }

    pub fn get(&self, k: usize, b: usize) -> u128 {
        if k > self.n() {
            return 0;
        }
        self.counts[k * self.m() + b % self.m()]
    }

    pub fn row(&self, k: usize) -> &[u128] {
        let m = self.m();
        &self.counts[k * m..(k + 1) * m]
    }
}

/// Dynamic program over the elements of `D` with state (subset size, residue).
pub fn count_subset_sums(set: &ResidueSet) -> Result<CountTable> {
    let (m, n) = (set.m, set.len());
    check_cap("|D|", n, MAX_DP_ELEMENTS)?;
    let mut counts = vec![0u128; (n + 1) * m];
    counts[0] = 1;
    for (used, &a) in set.members.iter().enumerate() {
        for k in (0..=used).rev() {
            for b in 0..m {
                let v = counts[k * m + b];
                if v != 0 {
                    counts[(k + 1) * m + (b + a) % m] += v;
                }
            }
        }
    }
    Ok(CountTable {
        set: set.clone(),
        counts,
    })
}

/// Same contract as [`count_subset_sums`], by walking all `2^n` subsets in
/// Gray-code order.
pub fn count_subset_sums_bruteforce(set: &ResidueSet) -> Result<CountTable> {
    let (m, n) = (set.m, set.len());
    check_cap("|D|", n, MAX_BRUTEFORCE_ELEMENTS)?;
    let mut counts = vec![0u128; (n + 1) * m];
    let (mut size, mut sum, mut gray) = (0usize, 0usize, 0u64);
    counts[0] = 1;
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        gray ^= 1 << i;
        let a = set.members[i];
        if (gray >> i) & 1 == 1 {
            size += 1;
            sum = (sum + a) % m;
        } else {
            size -= 1;
            sum = (sum + m - a) % m;
        }
        counts[size * m + sum] += 1;
    }
    Ok(CountTable {
        set: set.clone(),
        counts,
    })
}

/// `N(b, D) = Σ_k N(k, b, D)`, the number of subsets of `D` (of any size,
/// the empty set included) summing to `b`.
pub fn count_all_sizes(set: &ResidueSet, b: usize) -> Result<u128> {
    let m = set.m;
    check_cap("|D|", set.len(), 127)?;
    let mut ways = vec![0u128; m];
    ways[0] = 1;
    for &a in &set.members {
        let prev = ways.clone();
        for r in 0..m {
            ways[(r + a) % m] += prev[r];
        }
    }
    Ok(ways[b % m])
}

/// `N(k, b, D)` recovered from character sums:
/// `k!·N = m^{-1}·Σ_χ χ(-b)·F(χ)` with `F(χ)` the distinct-tuple sum of
/// `Π χ(x_i)`, evaluated through the conjugacy-class sieve.
pub fn count_via_characters(set: &ResidueSet, k: usize, b: usize) -> Result<f64> {
    let m = set.m;
    let mut total = Complex64::new(falling_factorial(set.len() as f64, k), 0.0);
    for j in 1..m {
        let chi = CharacterIndex { m, j };
        let power_sums: Vec<Complex64> = (1..=k).map(|i| character_sum(set, chi.pow(i))).collect();
        let f = symmetric_sieve(&power_sums, k)?;
        total += chi.value((m - b % m) % m) * f;
    }
    Ok(total.re / m as f64 / crate::sieve::factorial(k) as f64)
}

/// Agreement of the conjugacy-class sieve with the generic permutation sieve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetricAgreement {
    pub m: usize,
    pub k_max: usize,
    pub cases: usize,
    pub max_error: f64,
}

/// For every nonempty `D ⊆ Z_m`, every character `χ_j` and `1 ≤ k ≤ k_max`,
/// compares [`symmetric_sieve`] on the power sums of `D` with
/// [`sieve_distinct_sum`] of `Π χ(x_i)` over the explicit product `D^k`.
pub fn symmetric_agreement(m: usize, k_max: usize) -> Result<SymmetricAgreement> {
    check_cap("m", m, 8)?;
    check_cap("k", k_max, 5)?;
    let mut jobs = Vec::new();
    for mask in 1u64..(1u64 << m) {
        for j in 0..m {
            for k in 1..=k_max {
                jobs.push((mask, j, k));
            }
        }
    }
    let errors: Vec<f64> = jobs
        .par_iter()
        .map(|&(mask, j, k)| {
            let set = ResidueSet::from_mask(m, mask)?;
            let chi = CharacterIndex { m, j };
            let power_sums: Vec<Complex64> = (1..=k).map(|i| character_sum(&set, chi.pow(i))).collect();
            let fast = symmetric_sieve(&power_sums, k)?;
            let product = TupleSet::full_product(k, set.members().to_vec());
            let generic = sieve_distinct_sum(&product, |t| t.iter().map(|&a| chi.value(a)).product())?;
            Ok((fast - generic).norm())
        })
        .collect::<Result<_>>()?;
    Ok(SymmetricAgreement {
        m,
        k_max,
        cases: errors.len(),
        max_error: errors.into_iter().fold(0.0, f64::max),
    })
}

/// Pass/fail of each bound for one `(D, k, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundChecks {
    pub divisor: bool,
    pub divisor_corrected: bool,
    pub min_divisor: bool,
    pub min_divisor_corrected: bool,
    pub complement: Option<bool>,
    pub complement_corrected: Option<bool>,
}

impl BoundChecks {
    /// All bounds in their printed form.
    pub fn displayed_all(&self) -> bool {
        self.divisor && self.min_divisor && self.complement.unwrap_or(true)
    }

    /// All bounds with the upper argument that the periodic generating-function estimate
    /// actually yields.
    pub fn corrected_all(&self) -> bool {
        self.divisor_corrected && self.min_divisor_corrected && self.complement_corrected.unwrap_or(true)
    }
}

/// Deviation of `N(k, b, D)` from its mean `C(n,k)/m`, against the
/// character-sum bounds.
///
/// The printed bound uses the binomial upper argument `(n + Φ)/r + k - 1`.
/// Bounding each class term by `n` where `χ^i` is trivial and `Φ` elsewhere
/// gives `Φ + (n - Φ)/r + k - 1` instead, which is never smaller; the
/// `_corrected` fields carry that form.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub m: usize,
    pub members: Vec<usize>,
    pub n: usize,
    pub k: usize,
    pub b: usize,
    pub count: u128,
    /// `|m·N(k,b,D) - C(n,k)|`; the deviation is this over `m`.
    pub lhs_numer: u128,
    pub lhs: f64,
    pub phi_d: f64,
    /// Smallest prime divisor of `m`.
    pub d: usize,
    pub rhs_divisor: f64,
    pub rhs_divisor_corrected: f64,
    pub rhs_min_divisor: f64,
    pub rhs_min_divisor_corrected: f64,
    /// Present when `|D| = m - c` with `c ≥ 1`.
    pub rhs_complement: Option<f64>,
    pub rhs_complement_corrected: Option<f64>,
    pub holds: BoundChecks,
}

/// Precomputed counts and `Φ(D)` for evaluating many `(k, b)` pairs.
#[derive(Clone, Debug)]
pub struct BoundContext {
    table: CountTable,
    phi_d: f64,
    d: usize,
    /// `(r, φ(r))` for divisors `1 < r ≤ m`.
    divisor_weights: Vec<(usize, usize)>,
}

fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + BOUND_SLACK * rhs.max(1.0)
}

impl BoundContext {
    pub fn new(set: &ResidueSet) -> Result<Self> {
        let m = set.m;
        let d = smallest_prime_divisor(m).ok_or_else(|| Error::InvalidInput("bounds need m >= 2".into()))?;
        Ok(Self {
            table: count_subset_sums(set)?,
            phi_d: phi_of_d(set)?,
            d,
            divisor_weights: divisors(m)
                .into_iter()
                .filter(|&r| r > 1)
                .map(|r| (r, euler_phi(r)))
                .collect(),
        })
    }

    pub fn table(&self) -> &CountTable {
        &self.table
    }

    pub fn phi_d(&self) -> f64 {
        self.phi_d
    }

    pub fn report(&self, k: usize, b: usize) -> Result<BoundReport> {
        let set = self.table.set();
        let (m, n) = (set.m, set.len());
        if k > n || b >= m {
            return Err(Error::InvalidInput(format!("need k <= {n} and b < {m}")));
        }
        let count = self.table.get(k, b);
        let mean_numer = num_integer::binomial(n as u128, k as u128);
        let lhs_numer = (count * m as u128).abs_diff(mean_numer);
        let lhs = lhs_numer as f64 / m as f64;

        let (nf, phi, kf) = (n as f64, self.phi_d, k as f64);
        let weighted = |arg: &dyn Fn(f64) -> f64| {
            self.divisor_weights
                .iter()
                .map(|&(r, w)| w as f64 * generalized_binomial(arg(r as f64) + kf - 1.0, k))
                .sum::<f64>()
                / m as f64
        };
        let rhs_divisor = weighted(&|r| (nf + phi) / r);
        let rhs_divisor_corrected = weighted(&|r| phi + (nf - phi) / r);

        let df = self.d as f64;
        let rhs_min_divisor = generalized_binomial((nf + phi) / df + kf - 1.0, k);
        let rhs_min_divisor_corrected = generalized_binomial(phi + (nf - phi) / df + kf - 1.0, k);

        let c = m - n;
        let (rhs_complement, rhs_complement_corrected) = if c >= 1 {
            let cf = c as f64;
            (
                Some(generalized_binomial(m as f64 / df + kf - 1.0, k)),
                Some(generalized_binomial(cf + (m as f64 - 2.0 * cf) / df + kf - 1.0, k)),
            )
        } else {
            (None, None)
        };

        let holds = BoundChecks {
            divisor: within(lhs, rhs_divisor),
            divisor_corrected: within(lhs, rhs_divisor_corrected),
            min_divisor: within(lhs, rhs_min_divisor),
            min_divisor_corrected: within(lhs, rhs_min_divisor_corrected),
            complement: rhs_complement.map(|r| within(lhs, r)),
            complement_corrected: rhs_complement_corrected.map(|r| within(lhs, r)),
        };
        Ok(BoundReport {
            m,
            members: set.members.clone(),
            n,
            k,
            b,
            count,
            lhs_numer,
            lhs,
            phi_d: phi,
            d: self.d,
            rhs_divisor,
            rhs_divisor_corrected,
            rhs_min_divisor,
            rhs_min_divisor_corrected,
            rhs_complement,
            rhs_complement_corrected,
            holds,
        })
    }
}

pub fn bound_report(set: &ResidueSet, k: usize, b: usize) -> Result<BoundReport> {
    BoundContext::new(set)?.report(k, b)
}

/// Violation counts over a sweep of `(D, k, b)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BoundTally {
    pub instances: u64,
    pub divisor: u64,
    pub divisor_corrected: u64,
    pub min_divisor: u64,
    pub min_divisor_corrected: u64,
    pub complement: u64,
    pub complement_corrected: u64,
}

impl BoundTally {
    fn record(&mut self, h: &BoundChecks) {
        self.instances += 1;
        self.divisor += u64::from(!h.divisor);
        self.divisor_corrected += u64::from(!h.divisor_corrected);
        self.min_divisor += u64::from(!h.min_divisor);
        self.min_divisor_corrected += u64::from(!h.min_divisor_corrected);
        self.complement += u64::from(h.complement == Some(false));
        self.complement_corrected += u64::from(h.complement_corrected == Some(false));
    }

    fn merge(mut self, other: Self) -> Self {
        self.instances += other.instances;
        self.divisor += other.divisor;
        self.divisor_corrected += other.divisor_corrected;
        self.min_divisor += other.min_divisor;
        self.min_divisor_corrected += other.min_divisor_corrected;
        self.complement += other.complement;
        self.complement_corrected += other.complement_corrected;
        self
    }

    pub fn displayed_violations(&self) -> u64 {
        self.divisor + self.min_divisor + self.complement
    }

    pub fn corrected_violations(&self) -> u64 {
        self.divisor_corrected + self.min_divisor_corrected + self.complement_corrected
    }
}

/// Per-modulus result of [`bound_sweep`].
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub sets: u64,
    pub tally: BoundTally,
    /// First violation of the printed divisor bound, in sweep order.
    pub first_violation: Option<BoundReport>,
}

fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for a in start..m {
            cur.push(a);
            go(a + 1, m, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, r, &mut Vec::new(), &mut out);
    out
}

/// Checks every `D = Z_m \ S` with `|S| ≤ max_excluded`, every `0 ≤ k ≤ n`
/// and every `b`, for `2 ≤ m ≤ m_max`.
pub fn bound_sweep(m_max: usize, max_excluded: usize) -> Result<Vec<SweepRow>> {
    check_cap("m", m_max, MAX_DP_ELEMENTS)?;
    (2..=m_max)
        .map(|m| {
            let sets: Vec<Vec<usize>> = (0..=max_excluded.min(m - 1)).flat_map(|c| combinations(m, c)).collect();
            let per_set: Vec<(BoundTally, Option<BoundReport>)> = sets
                .par_iter()
                .map(|exclude| -> Result<_> {
                    let set = ResidueSet::excluding(m, exclude)?;
                    let ctx = BoundContext::new(&set)?;
                    let mut tally = BoundTally::default();
                    let mut first = None;
                    for k in 0..=set.len() {
                        for b in 0..m {
                            let report = ctx.report(k, b)?;
                            tally.record(&report.holds);
                            if first.is_none() && !report.holds.divisor {
                                first = Some(report);
                            }
                        }
                    }
                    Ok((tally, first))
                })
                .collect::<Result<_>>()?;
            let first_violation = per_set.iter().find_map(|(_, f)| f.clone());
            let tally = per_set
                .into_iter()
                .fold(BoundTally::default(), |acc, (t, _)| acc.merge(t));
            Ok(SweepRow {
                m,
                sets: sets.len() as u64,
                tally,
                first_violation,
            })
        })
        .collect()
}

/// `m/d + d - 2`, with `d` the smallest prime divisor of `m`.
pub fn zero_sum_threshold(m: usize) -> Result<f64> {
    let d = smallest_prime_divisor(m).ok_or_else(|| Error::InvalidInput("need m >= 2".into()))?;
    Ok(m as f64 / d as f64 + d as f64 - 2.0)
}

/// `(2 + ε)·√p`.
pub fn dias_da_silva_threshold(p: usize, epsilon: f64) -> f64 {
    (2.0 + epsilon) * (p as f64).sqrt()
}

/// True iff every `b ∈ Z_m` is the sum of some nonempty subset of `A`.
pub fn zero_sum_check(set: &ResidueSet) -> bool {
    let m = set.m;
    let mut reach = vec![false; m];
    for &a in &set.members {
        let prev = reach.clone();
        for (r, &hit) in prev.iter().enumerate() {
            if hit {
                reach[(r + a) % m] = true;
            }
        }
        reach[a] = true;
    }
    reach.into_iter().all(|r| r)
}

/// Same predicate over `m ≤ 32` with the set given as a bitmask.
fn covers_all_residues(m: usize, mask: u32) -> bool {
    let full: u64 = (1u64 << m) - 1;
    let mut reach: u64 = 0;
    let mut rest = mask;
    while rest != 0 {
        let a = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let rotated = if a == 0 {
            reach
        } else {
            ((reach << a) | (reach >> (m - a))) & full
        };
        reach |= rotated | (1 << a);
    }
    reach == full
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ScanMode {
    /// Every candidate set above the threshold.
    Exhaustive,
    /// `samples` random candidate sets drawn from a seeded generator.
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroSumReport {
    pub m: usize,
    pub threshold: f64,
    /// Smallest cardinality strictly above the threshold.
    pub min_size: usize,
    pub mode: ScanMode,
    pub include_zero: bool,
    pub sets_checked: u64,
    /// Sets that miss some residue, in ascending bitmask order for
    /// exhaustive scans and in draw order for sampled ones.
    pub counterexamples: Vec<Vec<usize>>,
}

/// Scans candidate sets `A` with `|A| > m/d + d - 2`.
///
/// Candidates are drawn from `Z_m \ {0}` unless `include_zero` is set: the
/// residue 0 never changes a subset sum, so sets containing it are not
/// covered by the threshold.
pub fn zero_sum_scan(m: usize, mode: ScanMode, include_zero: bool) -> Result<ZeroSumReport> {
    let threshold = zero_sum_threshold(m)?;
    scan_above(m, threshold, mode, include_zero)
}

/// Scans zero-free `A ⊆ Z_p` with `|A| > (2+ε)√p`. The underlying statement
/// is asymptotic, so counterexamples at small `p` are reported, not raised.
pub fn dias_da_silva_scan(p: usize, epsilon: f64, mode: ScanMode) -> Result<ZeroSumReport> {
    if !crate::weighted_sum::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    scan_above(p, dias_da_silva_threshold(p, epsilon), mode, false)
}

fn scan_above(m: usize, threshold: f64, mode: ScanMode, include_zero: bool) -> Result<ZeroSumReport> {
    match mode {
        ScanMode::Exhaustive => check_cap("m", m, MAX_EXHAUSTIVE_SCAN_M)?,
        ScanMode::Sampled { .. } => check_cap("m", m, MAX_SAMPLED_SCAN_M)?,
    }
    if m < 2 {
        return Err(Error::InvalidInput("need m >= 2".into()));
    }
    let min_size = threshold.floor() as usize + 1;
    let candidates: Vec<usize> = (0..m).filter(|&a| include_zero || a != 0).collect();

    let masks: Vec<u32> = if min_size > candidates.len() {
        Vec::new()
    } else {
        match mode {
            ScanMode::Exhaustive => {
                let allowed: u32 = candidates.iter().map(|&a| 1u32 << a).sum();
                (0u32..(1u32 << m))
                    .filter(|&mask| mask & !allowed == 0 && mask.count_ones() as usize >= min_size)
                    .collect()
            }
            ScanMode::Sampled { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..samples)
                    .map(|_| {
                        let size = rng.gen_range(min_size..=candidates.len());
                        sample(&mut rng, candidates.len(), size)
                            .into_iter()
                            .map(|i| 1u32 << candidates[i])
                            .sum()
                    })
                    .collect()
            }
        }
    };

    let counterexamples = masks
        .par_iter()
        .filter(|&&mask| !covers_all_residues(m, mask))
        .map(|&mask| (0..m).filter(|&a| (mask >> a) & 1 == 1).collect())
        .collect();
    Ok(ZeroSumReport {
        m,
        threshold,
        min_size,
        mode,
        include_zero,
        sets_checked: masks.len() as u64,
        counterexamples,
    })
}

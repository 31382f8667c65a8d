//! The distinct-coordinate sieve.
//!
//! A sum over tuples with pairwise-distinct coordinates is rewritten as a
//! signed sum over permutations `τ ∈ S_k` of sums over the tuples that are
//! constant on each cycle of `τ`. When both the tuple set and the summand are
//! symmetric, only conjugacy classes (cycle types) matter.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_cap, Error, Result};

/// Largest `k` for which cycle types are enumerated.
pub const MAX_TYPE_K: usize = 20;
/// Largest `k` for the generic sieve, which walks all `k!` permutations.
pub const MAX_GENERIC_K: usize = 8;
/// Largest `k` accepted by the generating-function checks.
pub const MAX_PERIODIC_K: usize = 12;

/// Cycle type `(c_1, …, c_k)` of a permutation in `S_k`, with the size of
/// its conjugacy class and its sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PermutationType {
    /// `cycle_counts[i - 1]` is the number of cycles of length `i`.
    cycle_counts: Vec<usize>,
    count: u128,
    sign: i8,
}

impl PermutationType {
    /// Builds the type from its cycle counts; `Σ i·c_i` must equal the length.
    pub fn from_cycle_counts(cycle_counts: Vec<usize>) -> Result<Self> {
        let k = cycle_counts.len();
        let total: usize = cycle_counts.iter().enumerate().map(|(i, &c)| (i + 1) * c).sum();
        if total != k {
            return Err(Error::InvalidInput(format!(
                "cycle counts sum to {total}, expected {k}"
            )));
        }
        check_cap("k", k, MAX_TYPE_K)?;

        // k! / Π i^{c_i} c_i!
        let mut denom: u128 = 1;
        for (i, &c) in cycle_counts.iter().enumerate() {
            denom *= ((i + 1) as u128).pow(c as u32) * factorial(c);
        }
        let count = factorial(k) / denom;
        let cycles: usize = cycle_counts.iter().sum();
        let sign = if (k - cycles).is_multiple_of(2) { 1 } else { -1 };
        Ok(Self {
            cycle_counts,
            count,
            sign,
        })
    }

    pub fn k(&self) -> usize {
        self.cycle_counts.len()
    }

    pub fn cycle_counts(&self) -> &[usize] {
        &self.cycle_counts
    }

    /// Number of cycles of length `len`.
    pub fn cycles_of_length(&self, len: usize) -> usize {
        self.cycle_counts.get(len - 1).copied().unwrap_or(0)
    }

    /// Total number of cycles, fixed points included.
    pub fn cycles(&self) -> usize {
        self.cycle_counts.iter().sum()
    }

    /// Number of permutations of this type.
    pub fn count(&self) -> u128 {
        self.count
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// One entry per integer partition of `k`, largest parts first.
pub fn enumerate_types(k: usize) -> Result<Vec<PermutationType>> {
    check_cap("k", k, MAX_TYPE_K)?;
    let mut out = Vec::new();
    let mut parts = Vec::with_capacity(k);
    partitions(k, k, &mut parts, &mut |parts| {
        let mut counts = vec![0; k];
        for &p in parts {
            counts[p - 1] += 1;
        }
        out.push(PermutationType::from_cycle_counts(counts).expect("valid partition"));
    });
    Ok(out)
}

fn partitions(rest: usize, max_part: usize, parts: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if rest == 0 {
        emit(parts);
        return;
    }
    for p in (1..=max_part.min(rest)).rev() {
        parts.push(p);
        partitions(rest - p, p, parts, emit);
        parts.pop();
    }
}

/// Calls `visit` with every permutation of `0..k` (Heap's algorithm).
pub fn for_each_permutation(k: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut c = vec![0usize; k];
    visit(&perm);
    let mut i = 1;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Disjoint cycles of a permutation given in one-line notation.
pub fn cycle_decomposition(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut cycles = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push(i);
            i = perm[i];
        }
        cycles.push(cycle);
    }
    cycles
}

/// A finite set of length-`k` tuples over an alphabet.
#[derive(Clone, Debug)]
pub struct TupleSet<T> {
    k: usize,
    alphabet: Vec<T>,
    members: Members<T>,
}

#[derive(Clone, Debug)]
enum Members<T> {
    Explicit(Vec<Vec<T>>),
    FullProduct,
}

impl<T: Clone + PartialEq> TupleSet<T> {
    pub fn explicit(k: usize, alphabet: Vec<T>, tuples: Vec<Vec<T>>) -> Result<Self> {
        for t in &tuples {
            if t.len() != k {
                return Err(Error::LengthMismatch {
                    expected: k,
                    actual: t.len(),
                });
            }
            if t.iter().any(|x| !alphabet.contains(x)) {
                return Err(Error::InvalidInput("tuple entry outside the alphabet".into()));
            }
        }
        Ok(Self {
            k,
            alphabet,
            members: Members::Explicit(tuples),
        })
    }

    /// `D^k`.
    pub fn full_product(k: usize, alphabet: Vec<T>) -> Self {
        Self {
            k,
            alphabet,
            members: Members::FullProduct,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alphabet(&self) -> &[T] {
        &self.alphabet
    }

    pub fn is_full_product(&self) -> bool {
        matches!(self.members, Members::FullProduct)
    }

    pub fn for_each(&self, mut visit: impl FnMut(&[T])) {
        match &self.members {
            Members::Explicit(tuples) => tuples.iter().for_each(|t| visit(t)),
            Members::FullProduct => {
                let n = self.alphabet.len();
                if n == 0 && self.k > 0 {
                    return;
                }
                let mut digits = vec![0usize; self.k];
                let mut tuple: Vec<T> = digits.iter().map(|&d| self.alphabet[d].clone()).collect();
                loop {
                    visit(&tuple);
                    let mut pos = 0;
                    loop {
                        if pos == self.k {
                            return;
                        }
                        digits[pos] += 1;
                        if digits[pos] < n {
                            tuple[pos] = self.alphabet[digits[pos]].clone();
                            break;
                        }
                        digits[pos] = 0;
                        tuple[pos] = self.alphabet[0].clone();
                        pos += 1;
                    }
                }
            }
        }
    }
}

/// `Σ f(x)` over tuples of `set` whose coordinates are pairwise distinct,
/// by direct filtering.
pub fn direct_distinct_sum<T, F>(set: &TupleSet<T>, f: F) -> Complex64
where
    T: Clone + PartialEq,
    F: Fn(&[T]) -> Complex64,
{
    let mut total = Complex64::new(0.0, 0.0);
    set.for_each(|t| {
        let distinct = (0..t.len()).all(|i| (i + 1..t.len()).all(|j| t[i] != t[j]));
        if distinct {
            total += f(t);
        }
    });
    total
}

/// The same sum as [`direct_distinct_sum`], evaluated as `Σ_τ sign(τ)·F_τ`
/// where `F_τ` sums `f` over the tuples constant on every cycle of `τ`.
pub fn sieve_distinct_sum<T, F>(set: &TupleSet<T>, f: F) -> Result<Complex64>
where
    T: Clone + PartialEq,
    F: Fn(&[T]) -> Complex64,
{
    let k = set.k();
    check_cap("k", k, MAX_GENERIC_K)?;

    let mut tuples = Vec::new();
    set.for_each(|t| tuples.push((t.to_vec(), f(t))));

    let mut total = Complex64::new(0.0, 0.0);
    for_each_permutation(k, |perm| {
        let cycles = cycle_decomposition(perm);
        let sign = if (k - cycles.len()).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let f_tau: Complex64 = tuples
            .iter()
            .filter(|(t, _)| cycles.iter().all(|cycle| cycle.iter().all(|&i| t[i] == t[cycle[0]])))
            .map(|(_, v)| *v)
            .sum();
        total += f_tau * sign;
    });
    Ok(total)
}

/// Conjugacy-class form of the sieve for `X = D^k` and a summand that is a
/// product of one multiplicative character over the coordinates.
///
/// `power_sums[i - 1]` must hold `Σ_{a ∈ D} χ^i(a)` for `i = 1..=k`; the
/// result is `Σ_types sign·N(c)·Π_i power_sums[i - 1]^{c_i}`.
pub fn symmetric_sieve(power_sums: &[Complex64], k: usize) -> Result<Complex64> {
    if power_sums.len() < k {
        return Err(Error::LengthMismatch {
            expected: k,
            actual: power_sums.len(),
        });
    }
    let mut total = Complex64::new(0.0, 0.0);
    for ty in enumerate_types(k)? {
        let mut term = Complex64::new(ty.count() as f64 * f64::from(ty.sign()), 0.0);
        for (i, &c) in ty.cycle_counts().iter().enumerate() {
            if c > 0 {
                term *= power_sums[i].powu(c as u32);
            }
        }
        total += term;
    }
    Ok(total)
}

/// A random tuple set over a small alphabet with a random Gaussian-integer
/// valued summand, for equivalence trials.
#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub set: TupleSet<u8>,
    pub values: HashMap<Vec<u8>, Complex64>,
}

impl RandomInstance {
    /// Alphabet size is drawn from `k-1..=k+1` (at least 1) so that both
    /// distinct and repeated coordinates occur; up to 256 tuples are drawn.
    pub fn generate(k: usize, rng: &mut impl Rng) -> Self {
        let n = rng.gen_range(k.saturating_sub(1).max(1)..=k + 1) as u8;
        let alphabet: Vec<u8> = (0..n).collect();
        let draws = rng.gen_range(1..=256);
        let mut values = HashMap::new();
        let mut tuples = Vec::new();
        for _ in 0..draws {
            let t: Vec<u8> = (0..k).map(|_| rng.gen_range(0..n)).collect();
            if values.contains_key(&t) {
                continue;
            }
            let v = Complex64::new(rng.gen_range(-9..=9) as f64, rng.gen_range(-9..=9) as f64);
            values.insert(t.clone(), v);
            tuples.push(t);
        }
        let set = TupleSet::explicit(k, alphabet, tuples).expect("tuples drawn from the alphabet");
        Self { set, values }
    }

    pub fn value(&self, t: &[u8]) -> Complex64 {
        self.values[t]
    }
}

/// Result of seeded sieve-versus-direct trials for one `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SieveTrials {
    pub k: usize,
    pub trials: usize,
    pub mismatches: usize,
    pub max_error: f64,
}

/// Runs `trials` random instances through [`sieve_distinct_sum`] and
/// [`direct_distinct_sum`]. Values are small Gaussian integers, so both
/// routes are exact in double precision and must agree to `1e-9`.
pub fn sieve_trials(k: usize, trials: usize, seed: u64) -> Result<SieveTrials> {
    check_cap("k", k, MAX_GENERIC_K)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let instances: Vec<RandomInstance> = (0..trials).map(|_| RandomInstance::generate(k, &mut rng)).collect();
    let errors: Vec<f64> = instances
        .par_iter()
        .map(|inst| {
            let sieve = sieve_distinct_sum(&inst.set, |t| inst.value(t))?;
            let direct = direct_distinct_sum(&inst.set, |t| inst.value(t));
            Ok((sieve - direct).norm())
        })
        .collect::<Result<_>>()?;
    Ok(SieveTrials {
        k,
        trials,
        mismatches: errors.iter().filter(|&&e| e > 1e-9).count(),
        max_error: errors.iter().copied().fold(0.0, f64::max),
    })
}

/// `(x)_k = x(x-1)…(x-k+1)`, with `(x)_0 = 1`.
pub fn falling_factorial(x: f64, k: usize) -> f64 {
    (0..k).map(|i| x - i as f64).product()
}

/// `C(x, k) = (x)_k / k!` for real `x`.
pub fn generalized_binomial(x: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (x - i as f64) / (i + 1) as f64;
    }
    acc
}

pub fn falling_factorial_exact(x: i128, k: usize) -> i128 {
    (0..k as i128).map(|i| x - i).product()
}

/// Exact `C(x, k)` for integer `x`, including negative `x`.
pub fn binomial_exact(x: i128, k: usize) -> i128 {
    falling_factorial_exact(x, k) / factorial(k) as i128
}

/// `C_k(t_1, …, t_k) = Σ_types N(c)·Π t_i^{c_i}` in real arithmetic.
pub fn generating_function_ck(weights: &[f64]) -> Result<f64> {
    let k = weights.len();
    check_cap("k", k, MAX_PERIODIC_K)?;
    Ok(enumerate_types(k)?
        .iter()
        .map(|ty| {
            ty.cycle_counts()
                .iter()
                .enumerate()
                .fold(ty.count() as f64, |acc, (i, &c)| acc * weights[i].powi(c as i32))
        })
        .sum())
}

/// Exact integer version of [`generating_function_ck`].
pub fn generating_function_ck_exact(weights: &[i128]) -> Result<i128> {
    let k = weights.len();
    check_cap("k", k, MAX_PERIODIC_K)?;
    Ok(enumerate_types(k)?
        .iter()
        .map(|ty| {
            ty.cycle_counts()
                .iter()
                .enumerate()
                .fold(ty.count() as i128, |acc, (i, &c)| acc * weights[i].pow(c as u32))
        })
        .sum())
}

/// How a two-valued weight vector is laid out over positions `1..=k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodicConvention {
    /// `t_i = q` when `d | i`, otherwise `s`.
    QAtMultiples,
    /// `t_i = s` when `d | i`, otherwise `q`.
    SAtMultiples,
}

/// The layout under which the binomial-convolution closed form holds. This is
/// the one picked out by direct evaluation in [`periodic_gf_check`]; it is also
/// the coefficient of `z^k` in `k!·(1-z)^{-s}·(1-z^d)^{-(q-s)/d}`.
pub const PERIODIC_CONVENTION: PeriodicConvention = PeriodicConvention::QAtMultiples;

pub fn periodic_weights(k: usize, d: usize, q: i128, s: i128, convention: PeriodicConvention) -> Vec<i128> {
    (1..=k)
        .map(|i| match (convention, i % d == 0) {
            (PeriodicConvention::QAtMultiples, true) | (PeriodicConvention::SAtMultiples, false) => q,
            _ => s,
        })
        .collect()
}

/// Outcome of the generating-function identities for one `(k, q, s, d)`.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodicGfReport {
    pub k: usize,
    pub q: i64,
    pub s: i64,
    pub d: usize,
    /// `C_k(q, …, q)` by summation over cycle types.
    pub all_equal_direct: i128,
    /// `(q + k - 1)_k`.
    pub all_equal_closed: i128,
    pub all_equal_holds: bool,
    /// `C_k` with `q` at multiples of `d`.
    pub periodic_q_at_multiples: i128,
    /// `C_k` with `s` at multiples of `d`.
    pub periodic_s_at_multiples: i128,
    /// `k!·Σ_i C(a+i-1, a-1)·C(s+k-di-1, s-1)` with `a = (q-s)/d`; present
    /// only when `a ≥ 1` and `s ≥ 1` are integers.
    pub closed_form: Option<i128>,
    /// Layouts that reproduce the closed form.
    pub matching_conventions: Vec<PeriodicConvention>,
    /// `(s + k + (q-s)/d - 1)_k`.
    pub upper_bound: f64,
    /// `C_k` under [`PERIODIC_CONVENTION`] is at most `upper_bound`.
    pub inequality_holds: bool,
}

impl PeriodicGfReport {
    /// Whether the closed form matches the resolved layout, when defined.
    pub fn identity_holds(&self) -> Option<bool> {
        self.closed_form
            .map(|_| self.matching_conventions.contains(&PERIODIC_CONVENTION))
    }
}

pub fn periodic_gf_check(k: usize, q: i64, s: i64, d: usize) -> Result<PeriodicGfReport> {
    if k == 0 || d == 0 {
        return Err(Error::InvalidInput("k and d must be positive".into()));
    }
    check_cap("k", k, MAX_PERIODIC_K)?;
    if s < 0 || q < s {
        return Err(Error::InvalidInput("need 0 <= s <= q".into()));
    }
    let (q128, s128) = (q as i128, s as i128);

    let all_equal_direct = generating_function_ck_exact(&vec![q128; k])?;
    let all_equal_closed = falling_factorial_exact(q128 + k as i128 - 1, k);

    let periodic_q_at_multiples =
        generating_function_ck_exact(&periodic_weights(k, d, q128, s128, PeriodicConvention::QAtMultiples))?;
    let periodic_s_at_multiples =
        generating_function_ck_exact(&periodic_weights(k, d, q128, s128, PeriodicConvention::SAtMultiples))?;

    let diff = q128 - s128;
    let closed_form = if diff % d as i128 == 0 && diff / d as i128 >= 1 && s128 >= 1 {
        let a = diff / d as i128;
        let sum: i128 = (0..=k / d)
            .map(|i| {
                let i = i as i128;
                binomial_exact(a + i - 1, (a - 1) as usize)
                    * binomial_exact(s128 + k as i128 - d as i128 * i - 1, (s128 - 1) as usize)
            })
            .sum();
        Some(factorial(k) as i128 * sum)
    } else {
        None
    };
    let matching_conventions = match closed_form {
        Some(v) => [
            (PeriodicConvention::QAtMultiples, periodic_q_at_multiples),
            (PeriodicConvention::SAtMultiples, periodic_s_at_multiples),
        ]
        .into_iter()
        .filter(|&(_, direct)| direct == v)
        .map(|(c, _)| c)
        .collect(),
        None => Vec::new(),
    };

    let upper_bound = falling_factorial(s as f64 + k as f64 + (q - s) as f64 / d as f64 - 1.0, k);
    let resolved = match PERIODIC_CONVENTION {
        PeriodicConvention::QAtMultiples => periodic_q_at_multiples,
        PeriodicConvention::SAtMultiples => periodic_s_at_multiples,
    } as f64;
    let inequality_holds = resolved <= upper_bound * (1.0 + 1e-12);

    Ok(PeriodicGfReport {
        k,
        q,
        s,
        d,
        all_equal_direct,
        all_equal_closed,
        all_equal_holds: all_equal_direct == all_equal_closed,
        periodic_q_at_multiples,
        periodic_s_at_multiples,
        closed_form,
        matching_conventions,
        upper_bound,
        inequality_holds,
    })
}

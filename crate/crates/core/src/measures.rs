//! Weight and sensitivity measures of a truth table.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclic::{count_all_sizes, ResidueSet};
use crate::error::{check_cap, Result};
use crate::weighted_sum::{truth_table_with_cap, BitVector, FunctionSpec, TruthTable, DEFAULT_MAX_VARS};

/// Alternating bit masks selecting the lower half of each `2^i`-bit group.
const LANE_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Bit planes for per-lane counters; values stay below 64.
const PLANES: usize = 6;

/// Words handled per parallel task.
const WORDS_PER_TASK: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SensitivityReport {
    pub m: usize,
    /// `wt`, the number of ones.
    pub weight: u64,
    /// `σ_s`, the largest pointwise sensitivity.
    pub max_sensitivity: u32,
    /// `Σ_X σ_{s,X}`.
    pub total_flips: u64,
}

impl SensitivityReport {
    /// `σ_av = total_flips / 2^m`, reduced.
    pub fn average_sensitivity(&self) -> Ratio<u64> {
        Ratio::new(self.total_flips, 1u64 << self.m)
    }

    pub fn average_sensitivity_f64(&self) -> f64 {
        self.total_flips as f64 / (1u64 << self.m) as f64
    }

    /// `wt / 2^m`.
    pub fn weight_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.weight, 1u64 << self.m)
    }

    /// `σ_av / m = total_flips / (m·2^m)`.
    pub fn sensitivity_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.total_flips, (self.m as u64) << self.m)
    }
}

pub fn weight(tt: &TruthTable) -> u64 {
    tt.count_ones()
}

/// Number of coordinates whose flip changes the value at `x`.
pub fn pointwise_sensitivity(tt: &TruthTable, x: &BitVector) -> Result<u32> {
    let here = tt.value_at(x)?;
    let index = x.to_index();
    Ok((0..tt.m()).filter(|&i| tt.get(index ^ (1 << i)) != here).count() as u32)
}

/// Bits of `w` exchanged with their partner across coordinate `i < 6`.
#[inline]
fn swap_lanes(w: u64, i: usize) -> u64 {
    let shift = 1 << i;
    ((w >> shift) & LANE_MASKS[i]) | ((w & LANE_MASKS[i]) << shift)
}

/// Flip count and per-lane maximum for one 64-input word.
///
/// Each coordinate contributes a 64-bit "differs from neighbour" mask; the
/// masks are summed lane-wise into bit-sliced counters, and the largest lane
/// is read off the planes from the top bit down.
#[inline]
fn word_sensitivity(tt: &TruthTable, w: usize, lane_mask: u64) -> (u64, u32) {
    let words = tt.words();
    let here = words[w];
    let mut planes = [0u64; PLANES];
    let mut flips = 0u64;
    for i in 0..tt.m() {
        let diff = if i < 6 {
            (here ^ swap_lanes(here, i)) & lane_mask
        } else {
            here ^ words[w ^ (1 << (i - 6))]
        };
        flips += u64::from(diff.count_ones());
        let mut carry = diff;
        for plane in planes.iter_mut() {
            if carry == 0 {
                break;
            }
            let next = *plane & carry;
            *plane ^= carry;
            carry = next;
        }
    }
    let mut candidates = lane_mask;
    let mut max = 0u32;
    for (bit, plane) in planes.iter().enumerate().rev() {
        let hit = candidates & plane;
        if hit != 0 {
            candidates = hit;
            max |= 1 << bit;
        }
    }
    (flips, max)
}

pub fn sensitivity_report(tt: &TruthTable) -> Result<SensitivityReport> {
    sensitivity_report_with_cap(tt, DEFAULT_MAX_VARS)
}

pub fn sensitivity_report_with_cap(tt: &TruthTable, max_vars: usize) -> Result<SensitivityReport> {
    check_cap("m", tt.m(), max_vars)?;
    let lane_mask = tt.word_mask();
    let words = tt.words().len();
    let (total_flips, max_sensitivity) = (0..words)
        .into_par_iter()
        .with_min_len(WORDS_PER_TASK)
        .map(|w| word_sensitivity(tt, w, lane_mask))
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    Ok(SensitivityReport {
        m: tt.m(),
        weight: tt.count_ones(),
        max_sensitivity,
        total_flips,
    })
}

/// Both sides of `wt(f) = Σ_{s=0}^{m-1} N(0, Z_m \ {s})`, where `N(0, ·)`
/// counts subsets (of any size) summing to 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WeightIdentity {
    pub m: usize,
    pub enumerated: u64,
    pub via_counts: u128,
    pub holds: bool,
}

pub fn weight_identity_check(m: usize) -> Result<WeightIdentity> {
    let tt = truth_table_with_cap(&FunctionSpec::simplified(m)?, DEFAULT_MAX_VARS)?;
    let enumerated = tt.count_ones();
    let via_counts = (0..m)
        .map(|s| count_all_sizes(&ResidueSet::excluding(m, &[s])?, 0))
        .sum::<Result<u128>>()?;
    Ok(WeightIdentity {
        m,
        enumerated,
        via_counts,
        holds: via_counts == u128::from(enumerated),
    })
}

/// One row of the balance / average-sensitivity trend for `f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrendRow {
    pub m: usize,
    pub weight: u64,
    pub total_flips: u64,
    pub max_sensitivity: u32,
    /// `wt / 2^m`.
    pub weight_ratio: f64,
    /// `σ_av`.
    pub average_sensitivity: f64,
    /// `σ_av / m`.
    pub sensitivity_ratio: f64,
}

impl From<SensitivityReport> for TrendRow {
    fn from(r: SensitivityReport) -> Self {
        let ratio = |x: Ratio<u64>| *x.numer() as f64 / *x.denom() as f64;
        Self {
            m: r.m,
            weight: r.weight,
            total_flips: r.total_flips,
            max_sensitivity: r.max_sensitivity,
            weight_ratio: ratio(r.weight_ratio()),
            average_sensitivity: r.average_sensitivity_f64(),
            sensitivity_ratio: ratio(r.sensitivity_ratio()),
        }
    }
}

pub fn avg_sensitivity_trend(ms: impl IntoIterator<Item = usize>) -> Result<Vec<TrendRow>> {
    ms.into_iter()
        .map(|m| {
            let tt = truth_table_with_cap(&FunctionSpec::simplified(m)?, DEFAULT_MAX_VARS)?;
            Ok(sensitivity_report(&tt)?.into())
        })
        .collect()
}

/// The two subset-count double sums appearing in the asymptotic argument for
/// `σ_av(f)`, next to the exact `2^{m-1}·σ_av`.
///
/// Index sets `{i, s±i, s}` are taken as sets, so colliding indices collapse.
/// The sums are an estimate, not an identity, and are only reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SensitivityProofTerms {
    pub m: usize,
    /// `total_flips / 2 = 2^{m-1}·σ_av`.
    pub half_total_flips: u64,
    pub plus_sum: u128,
    pub minus_sum: u128,
}

pub fn sensitivity_proof_terms(m: usize) -> Result<SensitivityProofTerms> {
    let tt = truth_table_with_cap(&FunctionSpec::simplified(m)?, DEFAULT_MAX_VARS)?;
    let report = sensitivity_report(&tt)?;
    let sum_over = |third: &dyn Fn(usize, usize) -> usize| -> Result<u128> {
        let mut total = 0u128;
        for i in 0..m {
            for s in 0..m {
                let set = ResidueSet::excluding(m, &[i, third(s, i), s])?;
                total += count_all_sizes(&set, 0)?;
            }
        }
        Ok(total)
    };
    Ok(SensitivityProofTerms {
        m,
        half_total_flips: report.total_flips / 2,
        plus_sum: sum_over(&|s, i| (s + i) % m)?,
        minus_sum: sum_over(&|s, i| (s + m - i) % m)?,
    })
}

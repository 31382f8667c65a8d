//! Walsh–Fourier spectra.
//!
//! Coefficients are kept as exact integers `W(a) = Σ_X (-1)^{f(X) + a·X}`;
//! the normalized coefficient is `f̂(a) = W(a) / 2^m`.

use std::f64::consts::{LN_2, PI};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_cap, Error, Result};
use crate::weighted_sum::{truth_table_with_cap, FunctionSpec, TruthTable, DEFAULT_MAX_VARS};

/// Block size transformed in one piece before the cross-block stages.
const BLOCK_BITS: usize = 14;

/// Published maximal-coefficient table for `f`, `m = 1..=21`.
pub const TABLE1_FIXTURE_CSV: &str = include_str!("../data/table1.csv");

/// Pre-rounding tolerance accepted when comparing against the fixture.
pub const TABLE1_TOLERANCE: f64 = 5e-4;

/// Lower bound constant `γ` for the average sensitivity of `g`, as cited.
pub const GAMMA: f64 = 0.0575;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    m: usize,
    coeffs: Vec<i32>,
}

impl Spectrum {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    /// `W(a)`.
    pub fn get(&self, mask: u64) -> i32 {
        self.coeffs[mask as usize]
    }

    /// `f̂(a)`.
    pub fn coefficient(&self, mask: u64) -> Ratio<i64> {
        Ratio::new(i64::from(self.get(mask)), 1i64 << self.m)
    }

    /// `Σ_a W(a)^2`, which equals `4^m`.
    pub fn parseval_sum(&self) -> u128 {
        self.coeffs
            .par_iter()
            .map(|&w| (i64::from(w) * i64::from(w)) as u128)
            .sum()
    }
}

/// `f̂(a)` by direct summation over all inputs.
pub fn fourier_coefficient_naive(tt: &TruthTable, mask: u64) -> Ratio<i64> {
    let sum: i64 = (0..tt.len())
        .map(|x| {
            let odd = tt.get(x) ^ ((mask & x).count_ones() % 2 == 1);
            if odd {
                -1
            } else {
                1
            }
        })
        .sum();
    Ratio::new(sum, 1i64 << tt.m())
}

fn butterfly(lo: &mut [i32], hi: &mut [i32]) {
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = x + y;
        *b = x - y;
    }
}

fn fwht_serial(data: &mut [i32]) {
    let mut h = 1;
    while h < data.len() {
        for chunk in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            butterfly(lo, hi);
        }
        h *= 2;
    }
}

pub fn walsh_transform(tt: &TruthTable) -> Result<Spectrum> {
    walsh_transform_with_cap(tt, DEFAULT_MAX_VARS)
}

/// Fast Walsh–Hadamard transform of `(-1)^{f(X)}` in integer arithmetic.
///
/// Stages below `2^14` run serially inside independent blocks; the remaining
/// stages split each butterfly pair across workers. Every output is the same
/// integer combination regardless of scheduling.
pub fn walsh_transform_with_cap(tt: &TruthTable, max_vars: usize) -> Result<Spectrum> {
    let m = tt.m();
    check_cap("m", m, max_vars)?;
    check_cap("m", m, 30)?;
    let mut coeffs = vec![0i32; 1 << m];
    coeffs
        .par_iter_mut()
        .enumerate()
        .for_each(|(x, c)| *c = if tt.get(x as u64) { -1 } else { 1 });

    let block = 1usize << BLOCK_BITS.min(m);
    coeffs.par_chunks_mut(block).for_each(fwht_serial);
    let mut h = block;
    while h < coeffs.len() {
        coeffs.par_chunks_mut(2 * h).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(h);
            lo.par_chunks_mut(block)
                .zip(hi.par_chunks_mut(block))
                .for_each(|(l, r)| butterfly(l, r));
        });
        h *= 2;
    }
    Ok(Spectrum { m, coeffs })
}

/// Largest normalized coefficient and where it is attained.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub m: usize,
    /// `max_a |W(a)|`.
    pub max_abs_walsh: u64,
    /// Every mask attaining the maximum, ascending.
    pub argmax_masks: Vec<u64>,
    /// `m^{-1}·log2 max_a |f̂(a)|`.
    pub normalized_log: f64,
}

impl SpectrumSummary {
    /// `max_a |f̂(a)|` as a reduced fraction.
    pub fn max_abs(&self) -> Ratio<u64> {
        Ratio::new(self.max_abs_walsh, 1u64 << self.m)
    }

    pub fn max_abs_f64(&self) -> f64 {
        self.max_abs_walsh as f64 / (1u64 << self.m) as f64
    }
}

pub fn summarize(spectrum: &Spectrum) -> SpectrumSummary {
    let max_abs_walsh = spectrum.coeffs.par_iter().map(|w| w.unsigned_abs()).max().unwrap_or(0);
    let argmax_masks: Vec<u64> = spectrum
        .coeffs
        .par_iter()
        .enumerate()
        .filter(|(_, w)| w.unsigned_abs() == max_abs_walsh)
        .map(|(a, _)| a as u64)
        .collect();
    let m = spectrum.m;
    let normalized_log = ((max_abs_walsh as f64).log2() - m as f64) / m as f64;
    SpectrumSummary {
        m,
        max_abs_walsh: u64::from(max_abs_walsh),
        argmax_masks,
        normalized_log,
    }
}

/// Rounds `numer / denom ≥ 0` to `digits` decimals, halves away from zero,
/// in exact integer arithmetic.
pub fn round_ratio_half_away(numer: u64, denom: u64, digits: u32) -> f64 {
    let scale = 10u128.pow(digits);
    let scaled = (2 * u128::from(numer) * scale + u128::from(denom)) / (2 * u128::from(denom));
    scaled as f64 / scale as f64
}

/// Rounds to `digits` decimals, halves away from zero; `-0.0` becomes `0.0`.
pub fn round_half_away(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    let r = (x * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Row {
    pub m: usize,
    pub max_abs: f64,
    pub normalized_log: f64,
    pub max_abs_3dp: f64,
    pub normalized_log_3dp: f64,
    pub argmax_masks: Vec<u64>,
}

impl Table1Row {
    fn from_summary(s: &SpectrumSummary) -> Self {
        Self {
            m: s.m,
            max_abs: s.max_abs_f64(),
            normalized_log: s.normalized_log,
            max_abs_3dp: round_ratio_half_away(s.max_abs_walsh, 1u64 << s.m, 3),
            normalized_log_3dp: round_half_away(s.normalized_log, 3),
            argmax_masks: s.argmax_masks.clone(),
        }
    }
}

/// Maximal coefficients of the simplified function for `1 ≤ m ≤ m_max`.
pub fn table1(m_max: usize) -> Result<Vec<Table1Row>> {
    table1_with_cap(m_max, DEFAULT_MAX_VARS)
}

pub fn table1_with_cap(m_max: usize, max_vars: usize) -> Result<Vec<Table1Row>> {
    check_cap("m_max", m_max, max_vars)?;
    (1..=m_max)
        .map(|m| {
            let tt = truth_table_with_cap(&FunctionSpec::simplified(m)?, max_vars)?;
            let spectrum = walsh_transform_with_cap(&tt, max_vars)?;
            Ok(Table1Row::from_summary(&summarize(&spectrum)))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixtureRow {
    pub m: usize,
    pub max_abs: f64,
    pub normalized_log: f64,
}

/// Parses `m,max_abs,normalized_log` lines after a header row.
pub fn parse_table1_fixture(text: &str) -> Result<Vec<FixtureRow>> {
    let bad = |line: &str| Error::InvalidInput(format!("malformed fixture line: {line:?}"));
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad(line));
            }
            Ok(FixtureRow {
                m: fields[0].parse().map_err(|_| bad(line))?,
                max_abs: fields[1].parse().map_err(|_| bad(line))?,
                normalized_log: fields[2].parse().map_err(|_| bad(line))?,
            })
        })
        .collect()
}

pub fn table1_fixture() -> Vec<FixtureRow> {
    parse_table1_fixture(TABLE1_FIXTURE_CSV).expect("bundled fixture parses")
}

fn column_matches(raw: f64, rounded: f64, expected: f64) -> bool {
    (rounded - expected).abs() < 1e-9 || (raw - expected).abs() <= TABLE1_TOLERANCE
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Mismatch {
    pub m: usize,
    pub column: &'static str,
    pub computed: f64,
    pub expected: f64,
}

/// Compares computed rows with fixture rows of the same `m`. A value matches
/// if its 3-decimal rounding equals the fixture, or if it lies within
/// [`TABLE1_TOLERANCE`] of it. Fixture rows without a computed row are ignored.
pub fn compare_table1(rows: &[Table1Row], fixture: &[FixtureRow]) -> Vec<Table1Mismatch> {
    let mut out = Vec::new();
    for row in rows {
        let Some(fx) = fixture.iter().find(|f| f.m == row.m) else {
            out.push(Table1Mismatch {
                m: row.m,
                column: "m",
                computed: row.m as f64,
                expected: f64::NAN,
            });
            continue;
        };
        if !column_matches(row.max_abs, row.max_abs_3dp, fx.max_abs) {
            out.push(Table1Mismatch {
                m: row.m,
                column: "max_abs",
                computed: row.max_abs,
                expected: fx.max_abs,
            });
        }
        if !column_matches(row.normalized_log, row.normalized_log_3dp, fx.normalized_log) {
            out.push(Table1Mismatch {
                m: row.m,
                column: "normalized_log",
                computed: row.normalized_log,
                expected: fx.normalized_log,
            });
        }
    }
    out
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn refine(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(fa, fm, fb, a, b);
    refine(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `L(x) = -∫_0^x ln cos θ dθ` for `0 ≤ x < π/2`.
pub fn lobachevsky_l(x: f64) -> f64 {
    adaptive_simpson(&|t: f64| -t.cos().ln(), 0.0, x, 1e-13)
}

/// `ρ = 4/(π ln 2)·L(π/4)`.
pub fn compute_rho() -> f64 {
    4.0 / (PI * LN_2) * lobachevsky_l(PI / 4.0)
}

pub fn compute_gamma_report() -> f64 {
    GAMMA
}

//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints exactly one PASS/FAIL line, even after a failure.

use std::process::{Command, ExitCode};
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsf_core::cyclic::{
    bound_sweep, count_subset_sums, count_subset_sums_bruteforce, symmetric_agreement, zero_sum_scan, ResidueSet,
    ScanMode,
};
use wsf_core::measures::{avg_sensitivity_trend, sensitivity_report, weight_identity_check};
use wsf_core::sieve::{periodic_gf_check, sieve_trials};
use wsf_core::spectrum::{compute_rho, fourier_coefficient_naive, walsh_transform};
use wsf_core::weighted_sum::{relabel_original_to_simplified, truth_table, BitVector, FunctionSpec};

/// `(m, weight, total_flips, max_sensitivity)` of `f`, frozen from an
/// independent enumeration.
const TREND_FIXTURE: &[(usize, u64, u64, u32)] = &[
    (2, 3, 4, 2),
    (3, 6, 12, 3),
    (4, 10, 40, 4),
    (5, 20, 104, 5),
    (6, 38, 200, 6),
    (7, 70, 452, 7),
    (8, 132, 992, 8),
    (9, 270, 2252, 9),
    (10, 524, 4880, 10),
    (11, 1034, 10588, 11),
    (12, 2068, 23120, 12),
    (13, 4108, 50072, 13),
    (14, 8210, 107992, 14),
    (15, 16440, 232432, 15),
    (16, 32776, 495904, 16),
    (17, 65552, 1056800, 17),
    (18, 131154, 2244248, 18),
    (19, 262162, 4746764, 19),
    (20, 524328, 10015008, 20),
    (21, 1048740, 21074712, 21),
    (22, 2097182, 44231784, 22),
];

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table1_reproduction() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_wsf"))
        .args(["table1", "--m-max", "21", "--compare-fixture"])
        .output()
        .map_err(|e| e.to_string())?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    ensure(out.status.success(), || {
        format!("exit {:?}: {}", out.status.code(), stderr.trim())
    })?;
    let rows = String::from_utf8_lossy(&out.stdout).lines().count() - 1;
    ensure(rows == 21, || format!("{rows} rows"))?;
    Ok("21 rows match at 3 decimals".into())
}

fn exact_small_measures() -> Check {
    for (m, weight, avg, max) in [(2, 3, Ratio::new(1, 1), 2), (3, 6, Ratio::new(3, 2), 3)] {
        let r = sensitivity_report(&truth_table(&FunctionSpec::simplified(m).unwrap()).unwrap()).unwrap();
        ensure(
            r.weight == weight && r.average_sensitivity() == avg && r.max_sensitivity == max,
            || format!("m={m}: {r:?}"),
        )?;
    }
    Ok("m=2: 3, 1, 2; m=3: 6, 3/2, 3".into())
}

fn weight_identity() -> Check {
    for m in 2..=20 {
        let id = weight_identity_check(m).map_err(|e| e.to_string())?;
        ensure(id.holds, || format!("m={m}: {} vs {}", id.enumerated, id.via_counts))?;
    }
    Ok("holds for 2 <= m <= 20".into())
}

fn asymptotic_trends() -> Check {
    let trend = avg_sensitivity_trend(2..=22).map_err(|e| e.to_string())?;
    for (row, &(m, weight, flips, max)) in trend.iter().zip(TREND_FIXTURE) {
        ensure(
            row.m == m && row.weight == weight && row.total_flips == flips && row.max_sensitivity == max,
            || format!("m={m}: {row:?}"),
        )?;
        // Both quotients of exact integers below 2^53, so f64 division is
        // correctly rounded and bitwise comparison is exact.
        let weight_ratio = weight as f64 / (1u64 << m) as f64;
        let sens_ratio = flips as f64 / ((m as u64) << m) as f64;
        ensure(
            row.weight_ratio.to_bits() == weight_ratio.to_bits()
                && row.sensitivity_ratio.to_bits() == sens_ratio.to_bits(),
            || format!("m={m}: ratios differ"),
        )?;
        if m >= 12 {
            let in_band = |r: f64| (0.4..=0.6).contains(&r);
            ensure(in_band(weight_ratio) && in_band(sens_ratio), || {
                format!("m={m}: ratios {weight_ratio} and {sens_ratio} outside [0.4, 0.6]")
            })?;
        }
    }
    ensure(trend.len() == TREND_FIXTURE.len(), || "trend length".into())?;
    Ok("m = 2..22 match frozen values; both ratios in [0.4, 0.6] for m >= 12".into())
}

fn character_sum_bounds() -> Check {
    let sweep = bound_sweep(20, 3).map_err(|e| e.to_string())?;
    let instances: u64 = sweep.iter().map(|r| r.tally.instances).sum();
    let divisor: u64 = sweep.iter().map(|r| r.tally.divisor).sum();
    let min_divisor: u64 = sweep.iter().map(|r| r.tally.min_divisor).sum();
    let complement: u64 = sweep.iter().map(|r| r.tally.complement).sum();
    let corrected: u64 = sweep.iter().map(|r| r.tally.corrected_violations()).sum();
    let first = sweep
        .iter()
        .find_map(|r| r.first_violation.as_ref())
        .map(|v| {
            format!(
                "; first at m={}, D={:?}, k={}, b={}: {} > {}",
                v.m, v.members, v.k, v.b, v.lhs, v.rhs_divisor
            )
        })
        .unwrap_or_default();
    ensure(divisor + min_divisor + complement == 0, || {
        format!(
            "{instances} instances: {divisor} divisor, {min_divisor} min-divisor, {complement} complement \
             violations of the printed bounds{first}; corrected forms: {corrected} violations"
        )
    })?;
    Ok(format!("{instances} instances, no violations"))
}

fn dp_matches_bruteforce() -> Check {
    let mut checked = 0usize;
    for m in 1..=10 {
        for mask in 0u64..(1 << m) {
            let set = ResidueSet::from_mask(m, mask).unwrap();
            ensure(
                count_subset_sums(&set).unwrap() == count_subset_sums_bruteforce(&set).unwrap(),
                || format!("m={m}, D={:?}", set.members()),
            )?;
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for m in 1..=16 {
        for _ in 0..100 {
            let set = ResidueSet::from_mask(m, rng.gen_range(0..1u64 << m)).unwrap();
            ensure(
                count_subset_sums(&set).unwrap() == count_subset_sums_bruteforce(&set).unwrap(),
                || format!("m={m}, D={:?}", set.members()),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} sets agree"))
}

fn sieve_correctness() -> Check {
    for k in 2..=6 {
        let t = sieve_trials(k, 100, 7).map_err(|e| e.to_string())?;
        ensure(t.mismatches == 0, || format!("k={k}: {} mismatches", t.mismatches))?;
    }
    let sym = symmetric_agreement(7, 4).map_err(|e| e.to_string())?;
    ensure(sym.max_error < 1e-9, || {
        format!("symmetric path error {}", sym.max_error)
    })?;
    Ok(format!("500 generic trials exact; {} symmetric cases agree", sym.cases))
}

fn periodic_generating_function() -> Check {
    for k in 1..=10 {
        for q in 0..=8 {
            let r = periodic_gf_check(k, q, 0, 1).map_err(|e| e.to_string())?;
            ensure(r.all_equal_holds, || format!("all-equal k={k}, q={q}"))?;
        }
    }
    let mut cases = 0;
    for k in 1..=8 {
        for d in [2usize, 3] {
            for s in 1..=6i64 {
                for a in 1..=4i64 {
                    let q = s + a * d as i64;
                    let r = periodic_gf_check(k, q, s, d).map_err(|e| e.to_string())?;
                    ensure(r.identity_holds() == Some(true), || {
                        format!("closed form k={k}, q={q}, s={s}, d={d}")
                    })?;
                    ensure(r.inequality_holds, || format!("inequality k={k}, q={q}, s={s}, d={d}"))?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("90 all-equal cases and {cases} periodic cases hold"))
}

fn zero_sum() -> Check {
    let mut sets = 0;
    for m in 2..=16 {
        let r = zero_sum_scan(m, ScanMode::Exhaustive, false).map_err(|e| e.to_string())?;
        ensure(r.counterexamples.is_empty(), || {
            format!("m={m}: {:?}", r.counterexamples[0])
        })?;
        sets += r.sets_checked;
    }
    for m in 2..=24 {
        let mode = ScanMode::Sampled {
            samples: 10_000,
            seed: m as u64,
        };
        let r = zero_sum_scan(m, mode, false).map_err(|e| e.to_string())?;
        ensure(r.counterexamples.is_empty(), || {
            format!("m={m}: {:?}", r.counterexamples[0])
        })?;
        sets += r.sets_checked;
    }
    Ok(format!("{sets} sets, no counterexamples"))
}

fn spectral_identities() -> Check {
    for m in 1..=21 {
        let tt = truth_table(&FunctionSpec::simplified(m).unwrap()).unwrap();
        let w = walsh_transform(&tt).unwrap();
        ensure(w.parseval_sum() == 1u128 << (2 * m), || format!("Parseval at m={m}"))?;
        if m <= 20 {
            let expected = (1i64 << m) - 2 * tt.count_ones() as i64;
            ensure(i64::from(w.get(0)) == expected, || format!("W(0) at m={m}"))?;
        }
        if m <= 10 {
            for a in 0..1u64 << m {
                ensure(w.coefficient(a) == fourier_coefficient_naive(&tt, a), || {
                    format!("m={m}, a={a}")
                })?;
            }
        }
    }
    Ok("Parseval m <= 21, W(0) m <= 20, naive m <= 10".into())
}

fn prime_equivalence() -> Check {
    for m in [2usize, 3, 5, 7, 11, 13] {
        let f = FunctionSpec::simplified(m).unwrap();
        let g = FunctionSpec::original(m).unwrap();
        for i in 0..1u64 << m {
            let x = BitVector::from_index(i, m);
            ensure(
                g.eval(&x).unwrap() == f.eval(&relabel_original_to_simplified(&x)).unwrap(),
                || format!("m={m}, x={x}"),
            )?;
        }
    }
    Ok("exhaustive for m in {2, 3, 5, 7, 11, 13}".into())
}

fn constants() -> Check {
    let rho = compute_rho();
    ensure(format!("{rho:.4}") == "0.1587", || format!("rho = {rho}"))?;
    Ok(format!("rho = {rho:.6}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("table reproduction", table1_reproduction),
        ("exact small-m measures", exact_small_measures),
        ("weight identity", weight_identity),
        ("balance and sensitivity trends", asymptotic_trends),
        ("character-sum bounds", character_sum_bounds),
        ("DP versus brute force", dp_matches_bruteforce),
        ("sieve correctness", sieve_correctness),
        ("periodic generating function", periodic_generating_function),
        ("zero-sum scan", zero_sum),
        ("spectral identities", spectral_identities),
        ("prime-m equivalence", prime_equivalence),
        ("constants", constants),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

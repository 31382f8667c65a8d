use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsf_core::cyclic::{
    bound_sweep, count_subset_sums, count_subset_sums_bruteforce, phi_of_d, BoundContext, ResidueSet,
};
use wsf_core::measures::{pointwise_sensitivity, sensitivity_report, weight};
use wsf_core::sieve::{binomial_exact, periodic_gf_check};
use wsf_core::spectrum::{fourier_coefficient_naive, walsh_transform};
use wsf_core::weighted_sum::{relabel_original_to_simplified, truth_table, BitVector, FunctionSpec};

fn simplified_table(m: usize) -> wsf_core::TruthTable {
    truth_table(&FunctionSpec::simplified(m).unwrap()).unwrap()
}

#[test]
fn prime_moduli_agree_after_relabeling() {
    for m in [2usize, 3, 5, 7, 11, 13] {
        let f = simplified_table(m);
        let g = truth_table(&FunctionSpec::original(m).unwrap()).unwrap();
        for i in 0..1u64 << m {
            let x = BitVector::from_index(i, m);
            assert_eq!(
                g.value_at(&x).unwrap(),
                f.value_at(&relabel_original_to_simplified(&x)).unwrap(),
                "m={m}, x={x}"
            );
        }
    }
}

#[test]
fn composite_moduli_are_not_relabelings() {
    // For m = 4 the original variant reduces modulo 5, so position 5 exists
    // and the tables differ under the same relabeling.
    let m = 4;
    let f = simplified_table(m);
    let g = truth_table(&FunctionSpec::original(m).unwrap()).unwrap();
    let differs = (0..1u64 << m).any(|i| {
        let x = BitVector::from_index(i, m);
        g.value_at(&x).unwrap() != f.value_at(&relabel_original_to_simplified(&x)).unwrap()
    });
    assert!(differs);
}

#[test]
fn total_flips_count_each_boundary_edge_twice() {
    for m in 1..=12 {
        let tt = simplified_table(m);
        let mut edges = 0u64;
        for i in 0..tt.len() {
            for k in 0..m {
                let j = i ^ (1 << k);
                if i < j && tt.get(i) != tt.get(j) {
                    edges += 1;
                }
            }
        }
        assert_eq!(sensitivity_report(&tt).unwrap().total_flips, 2 * edges, "m={m}");
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let tt = simplified_table(20);
            let report = sensitivity_report(&tt).unwrap();
            let spectrum = walsh_transform(&tt).unwrap();
            (tt, report, spectrum.coeffs().to_vec())
        })
    };
    let one = run(1);
    for threads in [2, 3, 8] {
        let other = run(threads);
        assert_eq!(one.0, other.0);
        assert_eq!(one.1, other.1);
        assert!(one.2 == other.2, "spectra differ with {threads} threads");
    }
}

#[test]
fn fast_transform_matches_naive_on_sampled_masks() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in 11..=21 {
        let tt = simplified_table(m);
        let w = walsh_transform(&tt).unwrap();
        // The naive evaluation is O(2^m) per mask; keep the total moderate.
        let samples = if m <= 16 { 1000 } else { 40 };
        for _ in 0..samples {
            let a = rng.gen_range(0..1u64 << m);
            assert_eq!(w.coefficient(a), fourier_coefficient_naive(&tt, a), "m={m}, a={a}");
        }
    }
}

#[test]
fn corrected_bounds_hold_on_full_sweep() {
    let sweep = bound_sweep(20, 3).unwrap();
    let instances: u64 = sweep.iter().map(|r| r.tally.instances).sum();
    let corrected: u64 = sweep.iter().map(|r| r.tally.corrected_violations()).sum();
    assert!(instances > 1_000_000);
    assert_eq!(corrected, 0);
}

#[test]
fn printed_divisor_bound_violation_count_is_stable() {
    let sweep = bound_sweep(20, 3).unwrap();
    let tally = |f: fn(&wsf_core::cyclic::BoundTally) -> u64| sweep.iter().map(|r| f(&r.tally)).sum::<u64>();
    assert_eq!(tally(|t| t.divisor), 63512);
    assert_eq!(tally(|t| t.min_divisor), 51666);
    assert_eq!(tally(|t| t.complement), 49923);
    let odd: Vec<usize> = sweep.iter().filter(|r| r.tally.complement > 0).map(|r| r.m).collect();
    assert_eq!(odd, vec![7, 11, 13, 17, 19]);
}

#[test]
fn periodic_identity_grid() {
    for k in 1..=8 {
        for d in [2usize, 3] {
            for s in 1..=5i64 {
                for a in 1..=4i64 {
                    let r = periodic_gf_check(k, s + a * d as i64, s, d).unwrap();
                    assert_eq!(r.identity_holds(), Some(true), "k={k}, s={s}, a={a}, d={d}");
                    assert!(r.inequality_holds, "k={k}, s={s}, a={a}, d={d}");
                }
            }
        }
    }
}

#[test]
fn periodic_identity_is_undefined_off_the_integer_grid() {
    let r = periodic_gf_check(4, 6, 1, 2).unwrap();
    assert_eq!(r.closed_form, None);
    assert_eq!(r.identity_holds(), None);
}

fn residue_set() -> impl Strategy<Value = ResidueSet> {
    (1usize..=16)
        .prop_flat_map(|m| (Just(m), 0u64..(1u64 << m)))
        .prop_map(|(m, mask)| ResidueSet::from_mask(m, mask).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dp_agrees_with_enumeration(set in residue_set()) {
        prop_assert_eq!(count_subset_sums(&set).unwrap(), count_subset_sums_bruteforce(&set).unwrap());
    }

    #[test]
    fn counts_shift_under_translation(set in residue_set(), t in 0usize..16) {
        let m = set.m();
        let t = t % m;
        let base = count_subset_sums(&set).unwrap();
        let moved = count_subset_sums(&set.translate(t)).unwrap();
        for k in 0..=set.len() {
            for b in 0..m {
                prop_assert_eq!(moved.get(k, (b + k * t) % m), base.get(k, b));
            }
        }
    }

    #[test]
    fn complement_counts_mirror(set in residue_set()) {
        // Taking complements inside D maps k-subsets summing to b onto
        // (n-k)-subsets summing to Σ D - b.
        let m = set.m();
        let total: usize = set.members().iter().sum::<usize>() % m;
        let counts = count_subset_sums(&set).unwrap();
        let n = set.len();
        for k in 0..=n {
            let row: u128 = counts.row(k).iter().sum();
            prop_assert_eq!(row, binomial_exact(n as i128, k) as u128);
            for b in 0..m {
                prop_assert_eq!(counts.get(k, b), counts.get(n - k, (total + m - b) % m));
            }
        }
    }

    #[test]
    fn character_bound_of_complement(set in residue_set()) {
        // For nontrivial χ, s_χ(Z_m \ S) = -s_χ(S), so Φ(Z_m \ S) ≤ |S|.
        prop_assume!(set.m() >= 2);
        let removed = set.complement();
        prop_assert!(phi_of_d(&set).unwrap() <= removed.len() as f64 + 1e-9);
    }

    #[test]
    fn corrected_bound_holds_for_random_sets(set in residue_set(), k in 0usize..17, b in 0usize..16) {
        prop_assume!(set.m() >= 2);
        let k = k.min(set.len());
        let b = b % set.m();
        let report = BoundContext::new(&set).unwrap().report(k, b).unwrap();
        prop_assert!(report.lhs <= report.rhs_divisor_corrected * (1.0 + 1e-9) + 1e-9);
    }

    #[test]
    fn complementing_the_table_negates_the_spectrum(m in 1usize..=12) {
        let tt = simplified_table(m);
        let w = walsh_transform(&tt).unwrap();
        let wc = walsh_transform(&tt.complement()).unwrap();
        for (a, c) in w.coeffs().iter().zip(wc.coeffs()) {
            prop_assert_eq!(*a, -*c);
        }
        prop_assert_eq!(weight(&tt) + weight(&tt.complement()), 1u64 << m);
    }

    #[test]
    fn sensitivity_is_symmetric_under_complement(m in 1usize..=14, index in any::<u64>()) {
        let tt = simplified_table(m);
        let x = BitVector::from_index(index & ((1u64 << m) - 1), m);
        prop_assert_eq!(pointwise_sensitivity(&tt, &x).unwrap(), pointwise_sensitivity(&tt.complement(), &x).unwrap());
    }
}

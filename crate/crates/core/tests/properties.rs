//! Property tests over random measurements.

use proptest::prelude::*;
use qmeas_core::info::{information_gain, operation_fidelity, overall_fidelity, reversibility};
use qmeas_core::linalg::{ginibre, haar_unitary};
use qmeas_core::oracle::{
    exact_estimation_fidelity, exact_operation_fidelity, exact_overall_fidelity, exact_reversibility,
    schur_pair_average, schur_pair_average_two_copy,
};
use qmeas_core::tradeoff::{check_chain, fidelity_chain, rhs_gap_gdr_vs_gd};
use qmeas_core::{
    analyze, optimal_reversal, ComplexMatrix, InfoContents, Measurement, ReversalSingularTable, Tolerances,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_measurement(d: usize, n: usize, seed: u64) -> Measurement {
    Measurement::random(d, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 96,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn singular_table_is_invariant_under_per_outcome_left_unitaries(
        d in 2usize..=5, n in 1usize..=4, seed in any::<u64>()
    ) {
        let m = random_measurement(d, n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let rotated = Measurement::new(
            m.operators().iter().map(|op| &haar_unitary(d, &mut rng) * op).collect(),
        )
        .unwrap();
        let a = m.singular_table().unwrap();
        let b = rotated.singular_table().unwrap();
        for (ra, rb) in a.rows().iter().zip(b.rows()) {
            for (x, y) in ra.iter().zip(rb) {
                prop_assert!((x - y).abs() < 1e-10, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn singular_values_satisfy_the_sum_rule(d in 1usize..=6, n in 1usize..=5, seed in any::<u64>()) {
        let t = random_measurement(d, n, seed).singular_table().unwrap();
        prop_assert!((t.sum_of_squares() - d as f64).abs() < 1e-10);
        for r in 0..n {
            prop_assert!(t.rows()[r].windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(t.largest(r) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn information_contents_stay_in_range(d in 2usize..=5, n in 1usize..=4, seed in any::<u64>()) {
        let info = InfoContents::of(&random_measurement(d, n, seed)).unwrap();
        prop_assert!(info.check_ranges(1e-10).is_ok(), "{info:?}");
    }

    #[test]
    fn all_relations_hold_on_random_measurements(d in 2usize..=5, n in 1usize..=4, seed in any::<u64>()) {
        let m = random_measurement(d, n, seed);
        let tol = Tolerances::default();
        let a = analyze(&m, &tol).unwrap();
        for report in a.tradeoffs.all().iter().chain([&a.lemma1, &a.lemma2]) {
            prop_assert!(report.slack >= -1e-10, "{report:?}");
        }
        prop_assert!(a.region.implications_hold(), "{:?}", a.region);
        prop_assert!(rhs_gap_gdr_vs_gd(&a.info, &tol).unwrap() >= -1e-12);
    }

    #[test]
    fn qubit_gain_and_reversibility_identity(n in 1usize..=5, seed in any::<u64>()) {
        let info = InfoContents::of(&random_measurement(2, n, seed)).unwrap();
        prop_assert!(((2.0 / 3.0 - info.gain) - info.reversibility / 6.0).abs() < 1e-12);
        let gap = rhs_gap_gdr_vs_gd(&info, &Tolerances::default()).unwrap();
        prop_assert!(gap.abs() < 1e-10);
    }

    #[test]
    fn optimal_reversal_contract(d in 2usize..=5, n in 1usize..=4, seed in any::<u64>()) {
        let m = random_measurement(d, n, seed);
        let cm = m.canonicalize().unwrap();
        let rev = optimal_reversal(&cm);
        prop_assert!(rev.completeness_residual() < 1e-10);
        for r in 0..n {
            let lam = cm.singulars(r)[d - 1];
            let target = ComplexMatrix::identity(d).scale_real(lam);
            let success = &rev.operators(r)[0] * &m.operators()[r];
            prop_assert!((&success - &target).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn sequential_composition_never_raises_fidelity(
        d in 2usize..=4, stages in 2usize..=4, seed in any::<u64>()
    ) {
        let chain: Vec<Measurement> = (0..stages)
            .map(|k| random_measurement(d, 2, seed.wrapping_add(k as u64)))
            .collect();
        let fids = fidelity_chain(&chain).unwrap();
        for report in check_chain(&fids, &Tolerances::default()) {
            prop_assert!(report.slack >= -1e-10, "{report:?}");
        }
    }

    #[test]
    fn trace_formula_matches_two_copy_construction(d in 2usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ga, gb) = (ginibre(d, &mut rng), ginibre(d, &mut rng));
        let a = &ga + &ga.adjoint();
        let b = &gb + &gb.adjoint();
        let direct = schur_pair_average(&a, &b).unwrap();
        let two_copy = schur_pair_average_two_copy(&a, &b).unwrap();
        prop_assert!((direct - two_copy).abs() < 1e-12, "{direct} vs {two_copy}");
    }

    #[test]
    fn exact_oracles_reproduce_closed_forms(d in 2usize..=5, n in 1usize..=4, seed in any::<u64>()) {
        let m = random_measurement(d, n, seed);
        let cm = m.canonicalize().unwrap();
        let t = cm.table().unwrap();
        let rev = optimal_reversal(&cm);
        let rt = ReversalSingularTable::new(&rev, &cm).unwrap();

        let gain = exact_estimation_fidelity(&m, &cm.optimal_estimates().unwrap()).unwrap().value;
        prop_assert!((gain - information_gain(&t)).abs() < 1e-12);
        let fid = exact_operation_fidelity(&cm.positive_part().unwrap()).unwrap().value;
        prop_assert!((fid - operation_fidelity(&t)).abs() < 1e-12);
        let overall = exact_overall_fidelity(&m, &rev).unwrap().value;
        prop_assert!((overall - overall_fidelity(&t, &rt).unwrap()).abs() < 1e-12);
        let rev_value = exact_reversibility(&m, &rev).unwrap().value;
        prop_assert!((rev_value - reversibility(&t)).abs() < 1e-12);
        // The as-given operators can only lose trace alignment.
        prop_assert!(exact_operation_fidelity(&m).unwrap().value <= fid + 1e-12);
    }
}

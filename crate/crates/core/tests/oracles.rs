//! Exact and Monte Carlo oracles against the singular-value formulas.

use qmeas_core::catalog::all_families;
use qmeas_core::info::{
    information_gain, operation_fidelity, overall_fidelity, reversibility, reversibility_with_errors, Depolarizing,
    ErrorModel, Uniform,
};
use qmeas_core::oracle::{
    exact_estimation_fidelity, exact_operation_fidelity, exact_overall_fidelity, exact_reversibility, mc_average,
    McKind,
};
use qmeas_core::{family, optimal_reversal, ComplexMatrix, Measurement, ReversalSingularTable, StateVector};

#[test]
fn exact_oracles_equal_formulas_on_the_catalog() {
    for f in all_families() {
        for p in f.grid(50).unwrap() {
            let m = f.build(p).unwrap();
            let cm = m.canonicalize().unwrap();
            let t = cm.table().unwrap();
            let rev = f.reversal(p).unwrap();
            let rt = ReversalSingularTable::new(&rev, &cm).unwrap();
            let canonical = cm.positive_part().unwrap();
            let checks = [
                (
                    exact_estimation_fidelity(&m, &cm.optimal_estimates().unwrap()).unwrap().value,
                    information_gain(&t),
                    "gain",
                ),
                (exact_operation_fidelity(&canonical).unwrap().value, operation_fidelity(&t), "op_fidelity"),
                (
                    exact_overall_fidelity(&m, &rev).unwrap().value,
                    overall_fidelity(&t, &rt).unwrap(),
                    "overall_fidelity",
                ),
                (exact_reversibility(&m, &rev).unwrap().value, reversibility(&t), "reversibility"),
            ];
            for (oracle, formula, what) in checks {
                assert!((oracle - formula).abs() < 1e-12, "{} p={p} {what}: {oracle} vs {formula}", f.name);
            }
        }
    }
}

#[test]
fn sign_flipped_frame_loses_operation_fidelity() {
    let m = family("ex_ii").unwrap().build(0.5).unwrap();
    let flip = ComplexMatrix::from_diag(&[1.0, -1.0, 1.0]);
    let flipped = m.left_multiplied(&flip).unwrap();
    let canonical = exact_operation_fidelity(&m).unwrap().value;
    assert!((canonical - 0.978_553_390_593_273_7).abs() < 1e-12);
    assert!(exact_operation_fidelity(&flipped).unwrap().value < canonical - 1e-3);
}

#[test]
fn wrong_estimates_lower_the_gain() {
    let m = family("qubit_weak").unwrap().build(0.5).unwrap();
    let best = exact_estimation_fidelity(&m, &m.canonicalize().unwrap().optimal_estimates().unwrap())
        .unwrap()
        .value;
    assert!((best - 3.5 / 6.0).abs() < 1e-12);
    let cm = m.canonicalize().unwrap();
    let wrong: Vec<StateVector> = (0..2)
        .map(|r| {
            let e = cm.optimal_estimate(r).unwrap();
            // The orthogonal qubit state (−b*, a*).
            let a = e.amplitudes();
            StateVector::new(vec![-a[1].conj(), a[0].conj()]).unwrap()
        })
        .collect();
    assert!(exact_estimation_fidelity(&m, &wrong).unwrap().value < best - 1e-3);
}

#[test]
fn monte_carlo_matches_exact_values() {
    let vn = Measurement::new((0..2).map(|i| ComplexMatrix::unit(2, i, i)).collect()).unwrap();
    let basis: Vec<StateVector> = (0..2).map(|i| StateVector::basis(2, i).unwrap()).collect();
    let est = mc_average(McKind::Gain, &vn, None, Some(&basis), 200_000, 1).unwrap();
    assert!(est.z_score(2.0 / 3.0) < 5.0, "{est:?}");

    let m = family("ex_ii").unwrap().build(0.5).unwrap();
    let rev = optimal_reversal(&m.canonicalize().unwrap());
    let exact = exact_overall_fidelity(&m, &rev).unwrap().value;
    let est = mc_average(McKind::OverallFidelity, &m, Some(&rev), None, 200_000, 2).unwrap();
    assert!(est.z_score(exact) < 5.0, "{est:?} vs {exact}");

    let op = mc_average(McKind::OpFidelity, &m, None, None, 200_000, 3).unwrap();
    assert!(op.z_score(exact_operation_fidelity(&m).unwrap().value) < 5.0);
}

#[test]
fn optimal_reversibility_integrand_is_state_independent() {
    let m = family("qubit_weak").unwrap().build(0.36).unwrap();
    let rev = optimal_reversal(&m.canonicalize().unwrap());
    let est = mc_average(McKind::Reversibility, &m, Some(&rev), None, 10_000, 4).unwrap();
    assert!(est.sample_variance < 1e-20);
    assert!((est.value - 0.64).abs() < 1e-12);
}

#[test]
fn monte_carlo_argument_errors() {
    let m = family("ex_ii").unwrap().build(0.5).unwrap();
    assert!(mc_average(McKind::OpFidelity, &m, None, None, 999, 0).is_err());
    assert!(mc_average(McKind::Reversibility, &m, None, None, 10_000, 0).is_err());
    assert!(mc_average(McKind::Gain, &m, None, None, 10_000, 0).is_err());
}

#[test]
fn monte_carlo_is_deterministic_per_seed() {
    let m = family("ex_iv").unwrap().build(0.3).unwrap();
    let a = mc_average(McKind::OpFidelity, &m, None, None, 50_000, 9).unwrap();
    let b = mc_average(McKind::OpFidelity, &m, None, None, 50_000, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn depolarized_weak_measurement_reversibility() {
    let f = family("qubit_weak").unwrap();
    let m = f.build(0.5).unwrap();
    let rev = f.reversal(0.5).unwrap();
    let model = ErrorModel::new(Box::new(Depolarizing), Box::new(Uniform::unit())).unwrap();
    let out = reversibility_with_errors(&m, &rev, &model, 100_000, 17).unwrap();
    assert!((out.base - 0.5).abs() < 1e-12);
    assert!((out.value - 0.375).abs() < 3.0 * out.std_error, "{out:?}");
    let clean = reversibility_with_errors(&m, &rev, &ErrorModel::noiseless(), 1000, 17).unwrap();
    assert!((clean.value - 0.5).abs() < 1e-12);
}

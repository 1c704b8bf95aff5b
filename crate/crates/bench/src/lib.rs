//! Shared fixtures for the criterion benchmarks.

use qmeas_core::montecarlo::stream_rng;
use qmeas_core::Measurement;

/// `count` seeded random measurements with `outcomes` operators on `dim`
/// levels.
pub fn random_measurements(dim: usize, outcomes: usize, count: usize, seed: u64) -> Vec<Measurement> {
    (0..count as u64)
        .map(|k| Measurement::random(dim, outcomes, &mut stream_rng(seed, k)).expect("valid sizes"))
        .collect()
}

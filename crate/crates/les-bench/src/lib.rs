//! Shared inputs for the benchmark targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use les_core::optimizer::repair;
use les_core::scenario::Scenario;
use les_core::schedule::{ScheduleDims, ScheduleMatrix};

/// A repaired random candidate for the given scenario.
pub fn random_repaired_candidate(scenario: &Scenario, seed: u64) -> ScheduleMatrix {
    let dims = ScheduleDims::of(scenario);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits: Vec<bool> = (0..dims.len()).map(|_| rng.gen_bool(0.5)).collect();
    repair(&ScheduleMatrix::from_bits(bits, dims), scenario)
}

/// A raw (unrepaired) random bit tensor.
pub fn random_raw_candidate(scenario: &Scenario, seed: u64) -> ScheduleMatrix {
    let dims = ScheduleDims::of(scenario);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits: Vec<bool> = (0..dims.len()).map(|_| rng.gen_bool(0.5)).collect();
    ScheduleMatrix::from_bits(bits, dims)
}

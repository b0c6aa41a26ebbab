//! Deterministic, splittable random streams for Monte Carlo runs.
//!
//! Each trial gets its own ChaCha stream keyed by (seed, trial index) through
//! a SplitMix64 expansion, so serial and parallel executions of the same
//! (seed, trials) pair visit identical sample paths trial by trial.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step; the standard 64-bit finalizer chain.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// RNG for one trial, derived from the run seed and the trial index.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut state = seed ^ trial.wrapping_mul(0xa076_1d64_78bd_642f);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

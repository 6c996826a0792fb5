//! Deterministic derivation of independent RNG streams from a single seed.
//!
//! Every randomized component takes its own purpose-tagged stream so that
//! adding or removing one consumer never perturbs another. This is what makes
//! whole-run traces reproducible and lets strategies that share a seed share
//! their initial design.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// splitmix64 step; good avalanche, tiny state.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent ChaCha stream from a base seed and a tag path.
///
/// The same `(seed, tags)` pair always yields the same stream; distinct tag
/// paths yield streams that are independent for practical purposes.
pub fn derive_rng(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = seed ^ 0x6a09_e667_f3bc_c908;
    for &t in tags {
        let mixed = splitmix64(&mut state);
        state = mixed ^ t.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        let word = splitmix64(&mut state);
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Tags for the fixed stream purposes used by the optimization driver.
pub mod tag {
    pub const INIT: u64 = 1;
    pub const MODEL: u64 = 2;
    pub const BASE_FIT: u64 = 3;
    pub const SUITE: u64 = 4;
    pub const ACQUIRE: u64 = 5;
    pub const BASE_SAMPLE: u64 = 6;
}

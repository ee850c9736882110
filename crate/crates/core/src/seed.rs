//! Seed derivation for independent work units.
//!
//! Every parallel unit (sweep point, RANDOM seed, sentence) draws from its own
//! generator whose seed is a pure function of the master seed and the unit's
//! coordinates. The mixing rule is a SplitMix64 fold:
//!
//! ```text
//! s0 = splitmix64(master)
//! s_{k+1} = splitmix64(s_k ^ coord_k)
//! ```
//!
//! so serial and parallel execution observe the same random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of the unit at `coords` under `master`.
pub fn derive(master: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix64(master), |acc, &c| splitmix64(acc ^ c))
}

/// Portable, version-stable generator used everywhere randomness is drawn.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

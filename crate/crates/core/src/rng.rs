//! Seeded randomness.
//!
//! Every random draw in the crate comes from [`ChaCha8Rng`] (crate
//! `rand_chacha` 0.9) seeded through `SeedableRng::seed_from_u64`, which
//! expands the 64-bit seed with PCG32 as documented by `rand_core`. Both steps
//! are platform independent, so a seed fully determines every model, truth
//! vector and initial point.
//!
//! Independent streams (model, truth, initial point, trial) are separated by
//! hashing the parent seed together with a tag using the SplitMix64 finalizer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `parent` and a sequence of integer tags.
pub fn derive_seed(parent: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix64(parent), |acc, &t| {
        splitmix64(acc ^ splitmix64(t))
    })
}

/// Stream tags for the sub-seeds of one trial.
pub mod stream {
    pub const MODEL: u64 = 1;
    pub const TRUTH: u64 = 2;
    pub const INIT: u64 = 3;
    pub const POWER: u64 = 4;
}

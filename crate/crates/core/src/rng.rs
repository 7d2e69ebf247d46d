//! Seeding helpers.
//!
//! Every stochastic component draws from a [`ChaCha8Rng`] seeded with
//! `seed_from_u64`. Independent streams (folds, samplers, optimizers) get their
//! seeds from [`derive_seed`], so results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used everywhere in the crate.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of one stream from the master seed.
///
/// `seed = mix(mix(mix(master) ^ stream) ^ fold)` where `mix` is the SplitMix64
/// finaliser. Stream indices are listed in [`streams`].
pub fn derive_seed(master: u64, stream: u64, fold: u64) -> u64 {
    mix64(mix64(mix64(master) ^ stream) ^ fold)
}

/// Fixed stream indices used by the pipeline.
pub mod streams {
    pub const FOLDS: u64 = 0;
    pub const SAMPLER: u64 = 1;
    pub const INTERNAL_SPLIT: u64 = 2;
    pub const NSGA2: u64 = 10;
    pub const MOPSO: u64 = 11;
    pub const MODE: u64 = 12;
}

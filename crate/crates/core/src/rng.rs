//! Seed derivation.
//!
//! Every stochastic component draws from a `ChaCha8Rng` seeded with a value
//! derived from a master seed through [`derive_seed`]. The derivation is the
//! SplitMix64 finalizer applied to `parent + golden * (tag + 1)`, so distinct
//! tags give statistically independent streams and the mapping never depends
//! on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `tag` under `parent`.
pub fn derive_seed(parent: u64, tag: u64) -> u64 {
    splitmix64(parent.wrapping_add(GOLDEN.wrapping_mul(tag.wrapping_add(1))))
}

/// Folds a sequence of tags into `parent`, one derivation per tag.
pub fn derive_seed_path(parent: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(parent, |s, &t| derive_seed(s, t))
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stable 64-bit tag for a multi-index.
pub fn index_tag(index: &[usize]) -> u64 {
    index
        .iter()
        .fold(0xCBF2_9CE4_8422_2325_u64, |h, &i| splitmix64(h ^ i as u64))
}

/// Well-known tags used to separate streams.
pub mod tags {
    pub const NUMERATOR: u64 = 0x6e75_6d;
    pub const DENOMINATOR: u64 = 0x6465_6e;
    pub const MONTE_CARLO: u64 = 0x6d63;
    pub const NOISE: u64 = 0x6e6f_6973_65;
}

//! Seeded, splittable random streams.
//!
//! Every randomized operation takes an explicit `u64` seed. Independent
//! sub-streams of one seed are obtained with [`stream`], and per-trial seeds
//! with [`trial_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for `seed`, stream 0.
pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for `seed` on an independent ChaCha stream.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed of trial `index` derived from a base seed.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

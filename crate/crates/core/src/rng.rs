//! Reproducible random streams.
//!
//! Every random draw in the crate comes from [`ChaCha8Rng`]. A master seed
//! selects the key (through `seed_from_u64`) and the 64-bit ChaCha stream id
//! selects an independent sub-sequence, so sample `k` of a batch (or
//! bootstrap iteration `k`) always uses `stream(seed, k)` regardless of how
//! the batch is scheduled across threads.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Generator used for single generations (`stream` 0).
pub fn from_seed(seed: u64) -> ChaCha8Rng {
    stream(seed, 0)
}

/// Independent stream `index` derived from `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

//! Deterministic RNG utilities.
//!
//! Every source of randomness in the crate is a `ChaCha8Rng` constructed
//! from an explicit seed, so identical inputs always reproduce identical
//! outputs bit for bit. Independent consumers of the same user-facing seed
//! draw from distinct stream ids instead of sharing one generator.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids for the independent random consumers of one seed.
pub mod stream {
    /// Device positions in scenario generation.
    pub const SCENARIO: u64 = 0;
    /// Synthetic-task sample generation.
    pub const TASK: u64 = 1;
    /// Dirichlet data partition.
    pub const PARTITION: u64 = 2;
    /// Mini-batch selection during local training.
    pub const MINIBATCH: u64 = 3;
}

/// Deterministic generator for `seed`, on the default stream.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic generator for `seed` on a dedicated stream.
pub fn seeded_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

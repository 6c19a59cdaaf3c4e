//! Seeded random streams.
//!
//! Every protocol round draws from its own ChaCha stream keyed by
//! `(master_seed, round_index)`, so a session's output does not depend on
//! how rounds are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RandomStream = ChaCha8Rng;

/// Independent stream for one round.
pub fn round_stream(master_seed: u64, round_index: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(round_index);
    rng
}

/// Seed for the `index`-th derived session (e.g. one sweep row).
///
/// Index 0 maps to the master seed itself.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    master_seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

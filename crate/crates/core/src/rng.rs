//! Seeded random number generation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used by every chain and experiment.
pub type ChainRng = ChaCha8Rng;

/// Identifier recorded in experiment outputs.
pub const RNG_ALGORITHM: &str = "ChaCha8";

pub fn seeded_rng(seed: u64) -> ChainRng {
    ChainRng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator keyed by `seed`.
pub fn split_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = seeded_rng(seed);
    rng.set_stream(stream);
    rng
}

//! Seeded, splittable random streams.
//!
//! Every chain gets its own ChaCha8 stream derived from `(seed, stream)`, so a
//! run is reproducible regardless of how chains are scheduled across threads.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as ChainRng;

pub fn stream(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChainRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

//! Seeded random streams.
//!
//! Every consumer of randomness derives its generator from a `(seed, stream)`
//! pair, so results never depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids reserved for the different random consumers.
pub(crate) const STREAM_INIT: u64 = 0;
pub(crate) const STREAM_ITERATIONS: u64 = 1;
pub(crate) const STREAM_PADDING: u64 = 2;
/// Per-sample streams start here; sample `j` uses `STREAM_SAMPLES + j`.
pub(crate) const STREAM_SAMPLES: u64 = 1 << 32;

/// Independent ChaCha8 stream for `(seed, stream)`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

//! Seeded, reproducible random streams.
//!
//! Every sampling plan draws from a ChaCha8 stream keyed by a `u64` seed.
//! Independent consumers take disjoint substreams via [`substream`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 20_071_005;
pub const DEFAULT_SAMPLES: usize = 10_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A stream for worker `index` that never overlaps the stream of another index.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

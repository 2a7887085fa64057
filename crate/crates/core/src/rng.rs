//! Seed handling. Every random stream is a ChaCha8 generator keyed by the
//! user seed and a stream index, so parallel work split into fixed chunks
//! draws the same numbers regardless of the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

//! Deterministic chunked parallel sweeps.

use std::ops::Range;

use rayon::prelude::*;

use crate::report::Tally;

/// Items per work chunk. Fixed, so chunk boundaries (and per-chunk random
/// streams) never depend on the thread count.
pub const CHUNK: usize = 4096;

/// Runs `f` over `0..len` split into chunks of `chunk` items and merges
/// the partial tallies in chunk order. `f` receives the chunk index, which
/// callers use as the random stream id.
pub fn sweep<F>(len: usize, chunk: usize, f: F) -> Tally
where
    F: Fn(u64, Range<usize>) -> Tally + Sync + Send,
{
    let chunk = chunk.max(1);
    let chunks = len.div_ceil(chunk);
    let parts: Vec<Tally> =
        (0..chunks).into_par_iter().map(|i| f(i as u64, i * chunk..((i + 1) * chunk).min(len))).collect();
    parts.into_iter().fold(Tally::default(), Tally::merge)
}

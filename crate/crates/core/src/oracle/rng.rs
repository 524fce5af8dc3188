//! Seeding rules for reproducible, parallelism-independent sampling.
//!
//! The generator is ChaCha8 (rand_chacha's `ChaCha8Rng`), a named, seedable,
//! platform-independent algorithm. The master 64-bit seed is expanded to the
//! 256-bit key with SplitMix64 (`SeedableRng::seed_from_u64`), and work is
//! split into fixed-size chunks of [`CHUNK_SAMPLES`] draws: chunk k reads the
//! generator's stream k. Chunk outputs are combined in chunk order, so the
//! result is bit-identical for any worker count, including the sequential
//! build.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Samples per scheduling chunk. Fixed: it is part of the determinism
/// contract, not a tuning knob.
pub const CHUNK_SAMPLES: u64 = 4096;

/// Generator for chunk `chunk` of the job seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Splits `total` items into chunk lengths of at most `size`.
pub(crate) fn chunk_lengths(total: u64, size: u64) -> impl Iterator<Item = (u64, u64)> {
    let chunks = total.div_ceil(size);
    (0..chunks).map(move |k| {
        let start = k * size;
        let len = size.min(total - start);
        (k, len)
    })
}

/// Runs `f` over every [`CHUNK_SAMPLES`]-sized chunk and collects outputs in
/// chunk order.
pub(crate) fn map_chunks<T, E, F>(total: u64, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64, u64) -> Result<T, E> + Sync,
{
    map_chunks_sized(total, CHUNK_SAMPLES, f)
}

/// Runs `f` over every chunk and collects outputs in chunk order. With the
/// `parallel` feature the chunks fan out across the rayon pool; without it
/// they run sequentially. Either way the output vector ordering is fixed.
pub(crate) fn map_chunks_sized<T, E, F>(total: u64, size: u64, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64, u64) -> Result<T, E> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        chunk_lengths(total, size)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(k, len)| f(k, len))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        chunk_lengths(total, size)
            .map(|(k, len)| f(k, len))
            .collect()
    }
}

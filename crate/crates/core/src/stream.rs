//! Seeded, counter-based random streams.
//!
//! A run of `n` draws is cut into fixed blocks of [`BLOCK_LEN`]; block `b` reads
//! ChaCha8 stream `b` under the run's seed. Every block can therefore be
//! generated independently, and results do not depend on how blocks are
//! scheduled across threads. Independent tasks partition the seed space with
//! [`substream_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const BLOCK_LEN: usize = 1 << 16;

/// Seed of task `task` under a run seed: `seed ⊕ task`.
///
/// Task ranges under nearby seeds overlap (`1 ⊕ 0 = 0 ⊕ 1`); for many
/// tasks per run prefer [`block_rng`] with the task as the stream.
pub fn substream_seed(seed: u64, task: u64) -> u64 {
    seed ^ task
}

pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Runs `f(rng, len)` on every block of an `n`-draw run, in parallel, and
/// returns the per-block results in block order.
pub fn map_blocks<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let n_blocks = n.div_ceil(BLOCK_LEN);
    (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_LEN.min(n - b * BLOCK_LEN);
            let mut rng = block_rng(seed, b as u64);
            f(&mut rng, len)
        })
        .collect()
}

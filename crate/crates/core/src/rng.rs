//! Seeded random streams.
//!
//! Every sampler in this crate takes an explicit `&mut impl Rng`; there is no
//! global RNG state. Parallel work units (runs, grid cells) derive their own
//! independent stream from a root seed plus integer tags, so results are
//! identical regardless of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a deterministic RNG from a root seed and a sequence of tags
/// (run index, cell index, ...). Distinct tag sequences give independent
/// streams; the same sequence always gives the same stream.
pub fn stream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = splitmix64(seed);
    for &t in tags {
        state = splitmix64(state ^ splitmix64(t.wrapping_add(0xa076_1d64_78bd_642f)));
    }
    ChaCha8Rng::seed_from_u64(state)
}

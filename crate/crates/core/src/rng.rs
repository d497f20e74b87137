//! Seeded randomness and the counter-based seed splitting rule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of task `index` under global seed `global`:
/// `splitmix64(global + (index + 1) * 0x9E3779B97F4A7C15)`.
pub fn derive_seed(global: u64, index: u64) -> u64 {
    splitmix64(global.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn task_rng(global: u64, index: u64) -> Rng {
    rng(derive_seed(global, index))
}

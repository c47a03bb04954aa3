//! Sub-seed derivation.
//!
//! Every random draw in an experiment is seeded from the master seed and a
//! tuple of small integers naming its role and position, so results do not
//! depend on execution order. The mixing function is SplitMix64 applied as a
//! chain:
//!
//! ```text
//! h = splitmix64(master)
//! h = splitmix64(h ^ role)
//! for each index i: h = splitmix64(h ^ i)
//! ```
//!
//! where `splitmix64(z)` is `z += 0x9E3779B97F4A7C15; z = (z ^ (z >> 30)) *
//! 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31)`
//! with wrapping arithmetic. The derived seed feeds a ChaCha8 generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Role tags mixed into derived seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Role {
    Mask = 1,
    Subset = 2,
    Adjacency = 3,
    InputWeights = 4,
    InitialState = 5,
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, role: Role, indices: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    h = splitmix64(h ^ role as u64);
    for &i in indices {
        h = splitmix64(h ^ i);
    }
    h
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

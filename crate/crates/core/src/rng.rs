//! Seeded random streams.
//!
//! Every random draw in the crate comes from a [`SimRng`] (ChaCha8). A
//! stream is addressed by a 64-bit seed plus a 64-bit stream number via
//! ChaCha's native `set_stream`, so two streams with the same seed and
//! different stream numbers are independent.
//!
//! Parallel jobs derive one seed per work item with [`derive_seed`], which
//! mixes the master seed with the item's coordinates through SplitMix64.
//! The derived seed depends only on the coordinates, never on the order in
//! which a worker pool happens to schedule items.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream numbers reserved for the different consumers of one seed.
pub mod streams {
    pub const WEIGHTS: u64 = 0;
    pub const INITIAL_STATE: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const PERTURBATION: u64 = 3;
    /// White-noise drive samples use `SIGNAL_BASE + n` for time step `n`.
    pub const SIGNAL_BASE: u64 = 1 << 32;
}

pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `master` with a list of coordinates into a fresh seed.
pub fn derive_seed(master: u64, coords: &[u64]) -> u64 {
    coords.iter().fold(splitmix64(master), |acc, &c| {
        splitmix64(acc ^ splitmix64(c))
    })
}

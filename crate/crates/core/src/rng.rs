//! Deterministic, splittable randomness.
//!
//! Every random choice in the crate flows from one `u64` seed. Independent consumers take
//! separate ChaCha streams of that seed, so adding a consumer never perturbs another one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type DetRng = ChaCha8Rng;

/// Generator for `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> DetRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream ids for the crate's consumers; kept in one place so they never collide.
pub mod streams {
    pub const MONOID_SAMPLES: u64 = 1;
    pub const MONOID_TRIALS: u64 = 2;
    pub const SPACE_SAMPLES: u64 = 3;
    pub const SPACE_TRIALS: u64 = 4;
    pub const FALSIFIER_BASE: u64 = 1 << 32;
    pub const DRIVER_PAIRS: u64 = 5;
    pub const MAJORANT_AUDIT: u64 = 6;
    pub const UNIFORM_POINTS: u64 = 7;
}

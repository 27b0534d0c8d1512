// SPDX-License-Identifier: MIT OR Apache-2.0

//! Counter-based stream derivation.
//!
//! Every parallel Monte-Carlo loop in the crate obtains its generator for work
//! item `i` from `stream(seed, domain, i)`. The result depends only on the
//! triple, never on scheduling, so results are identical for any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Domain tags keep unrelated consumers of the same master seed apart.
pub mod domain {
    pub const LIMIT_PATHS: u64 = 1;
    pub const NULL_DATA: u64 = 2;
    pub const ALT_DATA: u64 = 3;
    pub const NULL_DIRECTION: u64 = 4;
    pub const ALT_DIRECTION: u64 = 5;
    pub const GENERATE: u64 = 6;
}

pub fn stream(seed: u64, domain: u64, index: u64) -> SimRng {
    let mixed = seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    rng.set_stream(index);
    rng
}

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

//! Seed derivation and stream layout for reproducible experiments.
//!
//! Every trial gets its own seed derived from the master seed by a splitmix
//! finalizer, so trial `i` is reproducible in isolation and aggregates do not
//! depend on worker count or scheduling. Within a trial, the permutation and
//! the reader draw from separate ChaCha streams of the same seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// ChaCha stream id used for the arrival permutation.
pub const STREAM_PERMUTATION: u64 = 1;
/// ChaCha stream id used for reader randomness.
pub const STREAM_READER: u64 = 2;
/// ChaCha stream id readers reserve for branch coins.
pub const STREAM_COIN: u64 = 3;
/// ChaCha stream id readers reserve for an inner black box.
pub const STREAM_INNER: u64 = 4;

/// Mixes a master seed with an index into an independent 64-bit seed
/// (splitmix64 finalizer over a golden-ratio sequence).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for a given seed restricted to one stream.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

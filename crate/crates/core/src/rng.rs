//! Counter-based random streams.
//!
//! Every random quantity is a pure function of a key built from the master
//! seed and the indices that identify it (replica, edge, generation, ...).
//! Keys are mixed with the SplitMix64 finalizer; sequential draws come from
//! a ChaCha8 stream seeded with the mixed key.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes a sequence of words into one 64-bit key.
#[inline]
pub fn hash_words(words: &[u64]) -> u64 {
    let mut h = 0u64;
    for &w in words {
        h = mix64(h.wrapping_add(GOLDEN_GAMMA) ^ w);
    }
    mix64(h.wrapping_add(GOLDEN_GAMMA))
}

/// Hashes arbitrary bytes (e.g. a vertex encoding) into one word.
pub fn hash_bytes(bytes: &[u8]) -> u64 {
    let mut h = mix64(bytes.len() as u64);
    for chunk in bytes.chunks(8) {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        h = mix64(h.wrapping_add(GOLDEN_GAMMA) ^ u64::from_le_bytes(buf));
    }
    h
}

/// Maps 64 random bits to a uniform double in [0, 1).
#[inline]
pub fn to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Domain tags keep streams for different purposes apart.
pub mod tag {
    pub const BOND: u64 = 1;
    pub const BRANCHING: u64 = 2;
    pub const GALTON_WATSON: u64 = 3;
    pub const OFFSPRING: u64 = 4;
    pub const WALK: u64 = 5;
    pub const COUPLING: u64 = 6;
}

/// Uniform variate attached to (seed, replica, index).
#[inline]
pub fn uniform_at(seed: u64, replica: u64, index: u64) -> f64 {
    to_unit(hash_words(&[seed, tag::BOND, replica, index]))
}

/// A sequential stream keyed by `words`.
pub fn stream(words: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(hash_words(words))
}

//! Counter-based randomness.
//!
//! Every random quantity is a pure function of `(seed, stream, counter)`, so
//! edge weights can be recomputed on demand and trials can run on any thread
//! in any order without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keyed pseudo-random function of a 64-bit counter.
#[inline]
pub fn prf(key: u64, counter: u64) -> u64 {
    mix64(mix64(key ^ GOLDEN).wrapping_add(counter.wrapping_mul(GOLDEN)))
}

/// Independent sub-streams under one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    FppWeights = 0x4650_5057,
    Btp = 0x4254_5000,
    Walk = 0x5741_4c4b,
    Verify = 0x5645_5246,
}

/// Seed for trial `index` of `stream` under `master`.
#[inline]
pub fn derive_seed(master: u64, stream: Stream, index: u64) -> u64 {
    prf(prf(master, stream as u64), index)
}

/// Uniform in the open interval (0, 1): `(2k + 1) / 2^53` for a 52-bit `k`.
/// Both `u` and `1 - u` are exact and strictly inside (0, 1).
#[inline]
pub fn open01(bits: u64) -> f64 {
    let k = bits >> 12;
    (2 * k + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Exp(1) by inverse CDF; always finite and strictly positive.
#[inline]
pub fn exp1(bits: u64) -> f64 {
    -(1.0 - open01(bits)).ln()
}

/// Sequential generator for one trial.
pub fn trial_rng(master: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream, index))
}

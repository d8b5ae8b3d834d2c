//! Deterministic randomness plumbing. Every random choice in the crate flows
//! through a seeded ChaCha12 stream; helper functions derive independent
//! per-purpose seeds from one master seed so results are reproducible across
//! platforms and thread schedules.

use num_bigint::BigUint;
use num_traits::Zero;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// SplitMix64 finalizer; the standard 64-bit mixer.
pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives the `index`-th child seed of `base`.
pub(crate) fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index.wrapping_add(1)))
}

/// Folds an arbitrary byte string into a seed stream rooted at `base`.
/// Used to key per-theorem randomness off the theorem's decimal id.
pub(crate) fn seed_from_bytes(base: u64, bytes: &[u8]) -> u64 {
    let mut h = splitmix64(base);
    for chunk in bytes.chunks(8) {
        let mut limb = [0u8; 8];
        limb[..chunk.len()].copy_from_slice(chunk);
        h = splitmix64(h ^ u64::from_le_bytes(limb));
    }
    h
}

pub(crate) fn chacha(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Uniform draw from `0..bound` without modulo bias (rejection sampling).
pub(crate) fn uniform_usize(rng: &mut ChaCha12Rng, bound: usize) -> usize {
    assert!(bound > 0, "uniform_usize: empty range");
    let bound = bound as u64;
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return (v % bound) as usize;
        }
    }
}

/// Uniform `BigUint` from `0..bound` via top-bits rejection sampling.
pub(crate) fn uniform_biguint(rng: &mut ChaCha12Rng, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "uniform_biguint: empty range");
    let bits = bound.bits();
    let nbytes = bits.div_ceil(8) as usize;
    let excess_bits = (nbytes as u64) * 8 - bits;
    let mask: u8 = 0xFF >> excess_bits;
    let mut buf = alloc::vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        // Big-endian interpretation with the top byte masked keeps the draw
        // in [0, 2^bits), so the acceptance probability exceeds 1/2.
        buf[0] &= mask;
        let candidate = BigUint::from_bytes_be(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Uniform draw from `[0, 1)` (53-bit mantissa).
pub(crate) fn next_f64(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Fisher–Yates shuffle driven by the shared stream type.
pub(crate) fn shuffle<T>(rng: &mut ChaCha12Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_usize(rng, i + 1);
        items.swap(i, j);
    }
}

/// Draws `k` distinct indices from `0..n`, in random order.
pub(crate) fn sample_indices(rng: &mut ChaCha12Rng, n: usize, k: usize) -> alloc::vec::Vec<usize> {
    assert!(k <= n, "sample_indices: k > n");
    let mut all: alloc::vec::Vec<usize> = (0..n).collect();
    shuffle(rng, &mut all);
    all.truncate(k);
    all
}

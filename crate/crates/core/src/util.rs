//! Iterated logarithms, tower functions and seeded randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::runtime::mix64;

/// `max(1, log2 x)`: the clamped logarithm used by every schedule.
pub fn log2_bar(x: f64) -> f64 {
    if x <= 2.0 {
        1.0
    } else {
        x.log2()
    }
}

/// `log^(k) x`: `k`-fold base-2 logarithm, each step clamped at 1.
pub fn iter_log(k: u32, x: f64) -> f64 {
    let mut v = x.max(1.0);
    for _ in 0..k {
        v = log2_bar(v);
    }
    v
}

/// `log* x`: number of base-2 logarithms needed to bring `x` down to at most 1.
pub fn log_star(x: f64) -> u32 {
    let mut v = x;
    let mut k = 0;
    while v > 1.0 {
        v = v.log2();
        k += 1;
    }
    k
}

/// `2^^k` (a tower of `k` twos), saturating at `u64::MAX`.
pub fn tower(k: u32) -> u64 {
    let mut v: u64 = 1;
    for _ in 0..k {
        v = pow2_saturating(v);
        if v == u64::MAX {
            break;
        }
    }
    v
}

/// `2^x`, saturating at `u64::MAX`.
pub fn pow2_saturating(x: u64) -> u64 {
    if x >= 64 {
        u64::MAX
    } else {
        1u64 << x
    }
}

/// Derives an independent seed for a sub-computation.
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    mix64(mix64(seed ^ mix64(tag)) ^ index)
}

/// Per-item generator: depends only on `(seed, item)`, never on which
/// machine happens to process the item.
pub fn item_rng(seed: u64, item: u32) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..12].copy_from_slice(&item.to_le_bytes());
    bytes[16..24].copy_from_slice(&mix64(seed ^ item as u64).to_le_bytes());
    ChaCha8Rng::from_seed(bytes)
}

/// Packs two 32-bit fields into one word so a single read returns both.
#[inline]
pub(crate) fn pack(hi: u32, lo: u32) -> u64 {
    ((hi as u64) << 32) | lo as u64
}

#[inline]
pub(crate) fn unpack(w: u64) -> (u32, u32) {
    ((w >> 32) as u32, w as u32)
}

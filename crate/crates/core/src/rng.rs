//! Seeded, order-independent random streams.
//!
//! Every scalar draw is a pure function of `(seed, stream, index)`: the three
//! words are folded through SplitMix64 and the resulting 64-bit hash is mapped
//! to an open-interval uniform. Normal variates come from the inverse normal
//! CDF applied to that uniform, so a dataset can be generated row by row, node
//! by node, or in parallel chunks and still produce the same bytes.
//!
//! Sequential consumers (weight initialisation, shuffles) get a ChaCha8 stream
//! seeded from a derived key instead.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use std::sync::OnceLock;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 finalisation step.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of `(seed, stream, index)`.
#[inline]
pub fn mix(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index)
}

/// Derive a child seed for a named sub-task (grid point, replication, ...).
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    mix(seed, 0xD1B5_4A32_D192_ED03, label)
}

/// Stable 64-bit label for a string, used to key streams by column name.
pub fn label(name: &str) -> u64 {
    name.bytes().fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01B3))
}

/// Uniform draw strictly inside (0, 1).
#[inline]
pub fn uniform(seed: u64, stream: u64, index: u64) -> f64 {
    ((mix(seed, stream, index) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn unit_normal() -> &'static Normal {
    static N: OnceLock<Normal> = OnceLock::new();
    N.get_or_init(|| Normal::new(0.0, 1.0).expect("unit normal"))
}

/// Inverse CDF of the standard normal.
#[inline]
pub fn inverse_normal_cdf(p: f64) -> f64 {
    unit_normal().inverse_cdf(p)
}

/// Standard normal draw for `(seed, stream, index)`.
#[inline]
pub fn normal(seed: u64, stream: u64, index: u64) -> f64 {
    inverse_normal_cdf(uniform(seed, stream, index))
}

/// Sequential generator for consumers that need a stream of draws.
pub fn sequential(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal draw from a sequential generator, via the inverse CDF.
pub fn normal_from<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    inverse_normal_cdf(u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON))
}

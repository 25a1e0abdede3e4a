//! Deterministic random streams derived from one master seed.
//!
//! Each consumer asks for a stream by label (and optionally an index), so the
//! numbers it sees do not depend on what else drew from the master seed or in
//! which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used for every seeded operation in the crate.
pub type StreamRng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Seed for the stream `label` under `master`.
pub fn derive(master: u64, label: &str) -> u64 {
    splitmix(master ^ splitmix(fnv1a(label)))
}

/// Seed for item `index` of the stream `label` under `master`.
pub fn derive_indexed(master: u64, label: &str, index: u64) -> u64 {
    splitmix(derive(master, label) ^ splitmix(index.wrapping_add(1)))
}

pub fn stream(master: u64, label: &str) -> StreamRng {
    StreamRng::seed_from_u64(derive(master, label))
}

pub fn indexed_stream(master: u64, label: &str, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive_indexed(master, label, index))
}

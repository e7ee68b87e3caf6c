//! Counter-based random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream keyed by
//! a master seed plus a path of integers (domain tag, replicate index, chunk
//! index, ...). A stream depends only on its key, so results do not depend on
//! execution order or on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags keep unrelated consumers of one master seed apart.
pub mod domain {
    pub const PERMUTATION: u64 = 0x7065_726d;
    pub const MC_DRAWS: u64 = 0x6d63_6472;
    pub const MC_OUTER: u64 = 0x6d63_6f75;
    pub const MC_LINE: u64 = 0x6d63_6c6e;
    pub const SETTING: u64 = 0x7365_7474;
    pub const CONTAMINATION: u64 = 0x636f_6e74;
    pub const TEST: u64 = 0x7465_7374;
    pub const SCAN: u64 = 0x7363_616e;
    pub const SAMPLE: u64 = 0x7361_6d70;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fold a path of integers into a derived 64-bit seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Stream for `(seed, path)`. The seed and the folded path fill separate
/// halves of the 256-bit ChaCha key.
pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&derive_seed(seed, path).to_le_bytes());
    key[16..24].copy_from_slice(&(path.len() as u64).to_le_bytes());
    key[24..32].copy_from_slice(&path.first().copied().unwrap_or(0).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

//! Seeded random streams.
//!
//! Every replicate owns a private ChaCha8 stream. Its 256-bit key is
//! `SHA-256(master_seed as u64 LE || experiment name bytes || 0x00 || index as u64 LE)`,
//! so the stream for a given `(seed, name, index)` never depends on how many
//! other replicates exist or which worker runs it. ChaCha8 and SHA-256 are
//! both standardised, which lets other implementations regenerate the same
//! key material.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// 32-byte key for replicate `index` of experiment `name`.
pub fn stream_seed(master_seed: u64, name: &str, index: u64) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update(name.as_bytes());
    hasher.update([0u8]);
    hasher.update(index.to_le_bytes());
    hasher.finalize().into()
}

/// Independent stream for replicate `index` of experiment `name`.
pub fn stream_rng(master_seed: u64, name: &str, index: u64) -> SimRng {
    ChaCha8Rng::from_seed(stream_seed(master_seed, name, index))
}

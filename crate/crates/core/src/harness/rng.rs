//! Stream splitting: every component of a run draws from its own ChaCha20
//! stream, keyed by the root seed and a stable hash of the component path.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// First eight bytes of SHA-256 of `path`, little-endian.
pub fn stream_id(path: &str) -> u64 {
    let digest = Sha256::digest(path.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("eight bytes"))
}

pub fn stream(root_seed: u64, path: &str) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(root_seed);
    rng.set_stream(stream_id(path));
    rng
}

/// A 64-bit seed for a component that builds its own generator.
pub fn stream_seed(root_seed: u64, path: &str) -> u64 {
    stream(root_seed, path).next_u64()
}

//! Seed derivation for reproducible parallel streams.
//!
//! Every random draw in the engine comes from a ChaCha stream keyed by a
//! master seed plus a path of tags (step index, cell hash, chunk index, ...).
//! Work split across threads therefore never changes the numbers drawn.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with a tag path into a new 64-bit seed.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    for &t in tags {
        h = splitmix64(h ^ splitmix64(t.wrapping_add(0x632b_e59b_d9b4_e019)));
    }
    h
}

/// Opens the stream identified by `(master, tags)`.
pub fn stream(master: u64, tags: &[u64]) -> StreamRng {
    let mut key = [0u8; 32];
    let mut h = derive_seed(master, tags);
    for chunk in key.chunks_mut(8) {
        h = splitmix64(h);
        chunk.copy_from_slice(&h.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Hashes a cell coordinate tuple into a stream tag.
pub fn hash_coords(coords: &[u32]) -> u64 {
    let mut h = 0x51_7cc1_b727_220a_u64;
    for &c in coords {
        h = splitmix64(h ^ u64::from(c));
    }
    h
}

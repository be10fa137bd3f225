//! Seeded random streams.
//!
//! Every draw in the crate comes from a ChaCha8 stream keyed by
//! `(seed, purpose)` with the stream id set to a caller-chosen index. ChaCha
//! is counter based, so stream `k` is available without generating streams
//! `0..k`, and a Monte-Carlo loop that indexes streams by sample number gives
//! the same numbers no matter how the loop is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Tags separating the independent uses of a single user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Schedule = 1,
    Noise = 2,
    SparseVector = 3,
    EtaSample = 4,
    Isotropy = 5,
    SweepSchedule = 6,
    Field = 7,
    Scenario = 8,
    Incoherence = 9,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The generator for stream `index` of `purpose` under `seed`.
pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(&splitmix64(seed ^ purpose as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// A child seed for handing to another seeded operation.
pub fn derive_seed(seed: u64, purpose: Purpose, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ (purpose as u64).rotate_left(32)) ^ index)
}

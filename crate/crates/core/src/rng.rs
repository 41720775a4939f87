//! Seedable, portable random streams.
//!
//! Every stream is a `ChaCha8Rng` keyed by `(seed, level, restart)` and
//! selected by a purpose tag via the ChaCha stream id:
//!
//! * key bytes `0..8`   = `seed` (little endian)
//! * key bytes `8..16`  = `level` (little endian)
//! * key bytes `16..24` = `restart` (little endian)
//! * key bytes `24..32` = zero
//! * stream id          = purpose tag
//!
//! ChaCha output is specified bit-for-bit, so results match across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Purpose tags for independent streams within one restart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Init = 1,
    Moves = 2,
    Accept = 3,
    Temperature = 4,
    Sampling = 5,
}

pub fn stream(seed: u64, level: u64, restart: u64, purpose: Purpose) -> Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&level.to_le_bytes());
    key[16..24].copy_from_slice(&restart.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(purpose as u64);
    rng
}

/// A single stream keyed only by `seed`, for callers outside the solver.
pub fn seeded(seed: u64) -> Rng {
    stream(seed, 0, 0, Purpose::Sampling)
}

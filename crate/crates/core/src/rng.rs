//! Counter-based random streams.
//!
//! Every random quantity in the crate is a pure function of
//! `(seed, domain, replica, ordinal)`: a ChaCha8 keystream keyed by
//! `(seed, domain)` with the replica as stream id, read at word position
//! `2 * ordinal`. Results therefore do not depend on evaluation order or on
//! how replicas are spread across threads.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Separates the independent uses of a user seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Phases = 1,
    Translation = 2,
    Panel = 3,
    SpectrumShape = 4,
    Gaussian = 5,
    Equidistribution = 6,
    Models = 7,
}

pub fn stream(seed: u64, domain: Domain, replica: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replica);
    rng
}

/// Stream positioned at `ordinal` (each ordinal consumes one `u64`).
pub fn stream_at(seed: u64, domain: Domain, replica: u64, ordinal: u64) -> ChaCha8Rng {
    let mut rng = stream(seed, domain, replica);
    rng.set_word_pos(2 * ordinal as u128);
    rng
}

/// Uniform in `[0, 1)` from the top 53 bits.
#[inline]
pub fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

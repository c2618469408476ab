//! Deterministic, splittable random streams.
//!
//! Every replication draws from its own ChaCha8 stream. The key is derived
//! from the run seed and a domain tag, the stream id from the replication
//! index, so results never depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type StreamRng = ChaCha8Rng;

/// Domain tags keep streams used for different purposes disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Domain {
    Trajectory = 1,
    Crude = 2,
    Splitting = 3,
    Resample = 4,
    Tube = 5,
    Variational = 6,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a seed and a sequence of words into a 64-bit key.
pub fn mix_key(seed: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(splitmix64(seed), |acc, &w| splitmix64(acc ^ splitmix64(w)))
}

/// Stream `index` of the family identified by `(seed, domain, scope)`.
///
/// `scope` distinguishes sub-families inside one domain (replicate and stage
/// numbers for splitting, for example).
pub fn stream(seed: u64, domain: Domain, scope: &[u64], index: u64) -> StreamRng {
    let mut words = Vec::with_capacity(scope.len() + 1);
    words.push(domain as u64);
    words.extend_from_slice(scope);
    let mut rng = ChaCha8Rng::seed_from_u64(mix_key(seed, &words));
    rng.set_stream(index);
    rng
}

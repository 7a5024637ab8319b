//! Deterministic RNG plumbing.
//!
//! Every stochastic component in the crate takes an explicitly passed stream;
//! there is no hidden global randomness. Parallel or repeated runs derive
//! disjoint streams from per-run seeds.

use rand::SeedableRng;

/// The stream type used by the simulators and the harness.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Builds a deterministic stream from a 64-bit seed.
pub fn from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

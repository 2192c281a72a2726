//! Semiring-generic operational workbench.
//!
//! Builds states and projective measurements in Mat(S) over interchangeable
//! scalar algebras, evaluates empirical probability tables for multipartite
//! scenarios, and classifies tables as local, no-signalling, or signalling
//! with exact rational arithmetic.

pub mod classify;
pub mod error;
pub mod lp;
pub mod matcat;
pub mod operational;
pub mod presets;
pub mod rel;
pub mod scenario;
pub mod semiring;
pub mod stoch;
#[doc(hidden)]
pub mod testkit;
pub mod tuple;

pub use error::Error;

/// Deterministic RNG used by sampling-based validators and tests.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

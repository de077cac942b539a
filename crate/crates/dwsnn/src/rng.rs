//! Seeded, splittable randomness.
//!
//! All stochastic draws come from ChaCha8 keyed by the run seed. Every
//! consumer gets its own named stream (one per image presentation, one
//! for weight initialization), so the draw count of one consumer never
//! shifts another's sequence. This is what makes checkpoint-resumed
//! runs and parallel evaluation bit-reproducible.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream id reserved for synapse weight initialization.
pub const STREAM_WEIGHT_INIT: u64 = u64::MAX;

/// Factory for per-purpose random streams of a single run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngFactory {
    seed: u64,
}

impl RngFactory {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for the given stream id.
    pub fn stream(&self, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        rng
    }

    /// Stream used while presenting image number `ordinal` (counted
    /// globally across epochs).
    pub fn image_stream(&self, ordinal: u64) -> ChaCha8Rng {
        self.stream(ordinal)
    }
}

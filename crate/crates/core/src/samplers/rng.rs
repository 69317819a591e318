use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type SamplerRng = ChaCha8Rng;

/// Seed plus stream index; replicate `i` of a run with master seed `s` uses
/// `RngHandle::new(s, i)`, so results do not depend on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngHandle {
    pub seed: u64,
    pub stream: u64,
}

impl RngHandle {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngHandle { seed, stream }
    }

    pub fn rng(&self) -> SamplerRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

pub fn rng_for(seed: u64, stream: u64) -> SamplerRng {
    RngHandle::new(seed, stream).rng()
}

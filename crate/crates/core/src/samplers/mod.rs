//! Random generation: Boltzmann, size-conditioned, size-biased and Kesten
//! samplers, plus an exhaustive oracle for tiny sizes.

use thiserror::Error;

use crate::model::ModelError;

mod boltzmann;
mod conditioned;
pub mod deficit;
mod exact;
mod kesten;
mod rng;
mod size_biased;

pub use boltzmann::{BoltzmannSampler, DEFAULT_NODE_CAP};
pub use conditioned::{good_rotation, good_rotations, ConditionedSampler, RootMode, Strategy, DEFAULT_MAX_ATTEMPTS};
pub use exact::{enumerate, exact_small_reduced, exact_small_sampler, DEFAULT_ENUMERATION_CAP};
pub use kesten::{prune_to_ball, KestenSampler, KestenTree};
pub use rng::{rng_for, RngHandle, SamplerRng};
pub use size_biased::{root_block_increment, spine_increments, PlainGrowth, SizeBiasedSampler, SizeBiasedTree};

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("no tree of size {n} exists for this model")]
    InfeasibleSize { n: usize },
    #[error("no tree of the requested size after {attempts} attempts")]
    StrategyTimeout { attempts: usize },
    #[error("size {n} exceeds the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

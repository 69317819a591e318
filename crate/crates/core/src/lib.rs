//! Random Ω-k-trees: exact enumeration, Boltzmann and size-conditioned
//! sampling through front coding trees, the bijections between coding trees,
//! k-trees and plane trees, and the distance statistics used to study their
//! scaling and local limits.
//!
//! A k-tree grows from a k-clique by repeatedly attaching a vertex to an
//! existing k-clique (a front); a (k+1)-clique is a hedron and the size of a
//! k-tree is its number of hedra. In an Ω-k-tree every front lies in a number
//! of hedra taken from the degree set Ω, which always contains 0 and 1.

pub mod experiments;
pub mod metrics;
pub mod model;
pub mod pmf;
pub mod samplers;
pub mod series;
pub mod stats;
pub mod trees;

pub use experiments::{ExperimentConfig, ExperimentError, ModelSpec, StatRow};
pub use metrics::{algorithm1, DistanceTable, FiniteMetricSpace, MetricsError};
pub use model::{DegreeSet, ModelError, ModelParams, OmegaSet, ParamsReport};
pub use pmf::DiscretePmf;
pub use samplers::{
    rng_for, BoltzmannSampler, ConditionedSampler, KestenSampler, RngHandle, RootMode, SamplerError, SamplerRng,
    Strategy,
};
pub use series::SeriesError;
pub use trees::{phi, phi_inverse, psi, psi_inverse, CodingTree, KTreeGraph, PlaneTree, TreeError};

//! Distances in k-trees: front-sequence propagation, blocks, tiny-space
//! Gromov-Hausdorff distances, local neighbourhoods and summary statistics.

use thiserror::Error;

mod blocks;
mod distance;
mod gh;
mod local;
mod tree_stats;

pub use blocks::{
    block_decompose, block_distance, check_dist_delta, check_dist_delta_sampled, BlockDecomposition, DeltaHistogram,
};
pub use distance::{algorithm1, algorithm1_with, bfs_distances, DistanceTable, UNKNOWN};
pub use gh::{gh_bruteforce, gh_naive, FiniteMetricSpace, GH_POINT_CAP};
pub use local::{
    ball, front_distances, ktree_code, local_metric, neighborhood, neighborhood_from_coding, LocalDistance,
    GENERIC_ORDER_CAP,
};
pub use tree_stats::{graph_stats, tree_stats, GraphStats, TreeStats, EXACT_DIAMETER_LIMIT};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("vertices {x} and {y}: distance {dist} and block distance {delta} differ by more than 3")]
    LemmaViolation {
        x: usize,
        y: usize,
        dist: usize,
        delta: usize,
    },
    #[error("{points} points exceed the cap {cap}")]
    TooLarge { points: usize, cap: usize },
    #[error("not a metric: {0}")]
    NotMetric(String),
}

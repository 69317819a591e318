//! Coding trees, k-tree graphs, plane trees and the maps between them.

mod canon;
mod coding;
mod graph;
mod io;
mod maps;
mod plane;

pub use canon::{canonical_code, canonical_code_by};
pub use coding::{CodingTree, Color};
pub use graph::KTreeGraph;
pub use io::{CodingTreeJson, IoError};
pub use maps::{black_tree, phi, phi_inverse, psi, psi_inverse, BlackTree};
pub use plane::PlaneTree;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("invalid coding tree: {0}")]
    InvalidCodingTree(String),
    #[error("graph is not a k-tree: {0}")]
    NotAKTree(String),
    #[error("root front does not induce a clique")]
    DisconnectedRoot,
    #[error("vertex {node} has outdegree {degree}, not a multiple of k")]
    BadOutdegree { node: usize, degree: usize },
    #[error("degree sequence does not describe a plane tree")]
    BadDegreeSequence,
}

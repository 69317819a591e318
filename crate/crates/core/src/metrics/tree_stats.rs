//! Height, diameter and random-point distances of trees and graphs.

use std::collections::VecDeque;

use rand::Rng;
use serde::Serialize;

use crate::trees::{KTreeGraph, PlaneTree};

/// Graphs up to this many vertices get an exact diameter from all-pairs BFS.
pub const EXACT_DIAMETER_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub height: usize,
    pub diameter: usize,
    pub root_to_uniform: usize,
    pub uniform_pair: usize,
}

fn tree_bfs(t: &PlaneTree, src: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; t.len()];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let next = t.children(v).iter().copied().chain(t.parent(v));
        for u in next {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

fn argmax(d: &[usize]) -> usize {
    d.iter().enumerate().max_by_key(|&(_, &x)| x).map_or(0, |(i, _)| i)
}

/// Exact statistics; the diameter comes from a double BFS.
pub fn tree_stats<R: Rng + ?Sized>(t: &PlaneTree, rng: &mut R) -> TreeStats {
    let depths = t.depths();
    let far = tree_bfs(t, argmax(&depths));
    let u = rng.gen_range(0..t.len());
    let (a, b) = (rng.gen_range(0..t.len()), rng.gen_range(0..t.len()));
    TreeStats {
        height: depths.iter().copied().max().unwrap_or(0),
        diameter: far.iter().copied().max().unwrap_or(0),
        root_to_uniform: depths[u],
        uniform_pair: tree_bfs(t, a)[b],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    /// Distance from vertex 1 to a uniform vertex.
    pub root_to_uniform: usize,
    pub uniform_pair: usize,
    pub diameter: usize,
    /// Whether `diameter` is exact or the largest eccentricity seen from
    /// sampled sources.
    pub diameter_exact: bool,
}

/// Statistics of a connected graph; the diameter is exact up to
/// [`EXACT_DIAMETER_LIMIT`] vertices and otherwise estimated from
/// `sources` random BFS roots.
pub fn graph_stats<R: Rng + ?Sized>(g: &KTreeGraph, sources: usize, rng: &mut R) -> GraphStats {
    let n = g.vertex_count();
    let from_one = g.bfs_from(&[1]);
    let u = rng.gen_range(1..=n);
    let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
    let exact = n <= EXACT_DIAMETER_LIMIT;
    let roots: Vec<usize> = if exact {
        (1..=n).collect()
    } else {
        (0..sources.max(1)).map(|_| rng.gen_range(1..=n)).collect()
    };
    let diameter = roots
        .iter()
        .map(|&s| g.bfs_from(&[s])[1..].iter().copied().max().unwrap_or(0))
        .max()
        .unwrap_or(0);
    GraphStats {
        root_to_uniform: from_one[u],
        uniform_pair: g.bfs_from(&[a])[b],
        diameter,
        diameter_exact: exact,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::rng_for;

    #[test]
    fn path_and_star() {
        let path = PlaneTree::from_preorder_degrees(&[1, 1, 1, 0]).unwrap();
        let s = tree_stats(&path, &mut rng_for(1, 0));
        assert_eq!((s.height, s.diameter), (3, 3));
        let star = PlaneTree::from_preorder_degrees(&[4, 0, 0, 0, 0]).unwrap();
        let s = tree_stats(&star, &mut rng_for(1, 0));
        assert_eq!((s.height, s.diameter), (1, 2));
    }

    #[test]
    fn graph_diameter() {
        let g = KTreeGraph::from_edges(1, 4, &[(1, 2), (2, 3), (3, 4)], vec![1]);
        let s = graph_stats(&g, 4, &mut rng_for(2, 0));
        assert_eq!(s.diameter, 3);
        assert!(s.diameter_exact);
    }
}

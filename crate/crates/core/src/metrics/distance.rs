//! Distances to vertex 1 by propagating front distance sequences down the
//! coding tree.

use crate::trees::{CodingTree, KTreeGraph};

/// Front distance sequences of white nodes and distances of black nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    k: usize,
    dist: Vec<u32>,
    seqs: Vec<u32>,
    by_label: Vec<u32>,
}

pub const UNKNOWN: u32 = u32::MAX;

impl DistanceTable {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Distance of the vertex of black node `b`.
    pub fn black(&self, b: usize) -> u32 {
        self.dist[b]
    }

    /// Distance sequence of white node `w`.
    pub fn sequence(&self, w: usize) -> &[u32] {
        &self.seqs[w * self.k..(w + 1) * self.k]
    }

    pub fn is_constant(&self, w: usize) -> bool {
        let s = self.sequence(w);
        s.iter().all(|&a| a == s[0])
    }

    /// Distance by vertex label (root front included), [`UNKNOWN`] if absent.
    pub fn by_label(&self) -> &[u32] {
        &self.by_label
    }

    pub fn vertex(&self, label: usize) -> u32 {
        self.by_label.get(label).copied().unwrap_or(UNKNOWN)
    }
}

/// Distances to vertex 1, which must lie in the root front.
pub fn algorithm1(c: &CodingTree) -> DistanceTable {
    let init: Vec<u32> = c.root_front().iter().map(|&v| u32::from(v != 1)).collect();
    assert!(init.contains(&0), "vertex 1 must belong to the root front");
    algorithm1_with(c, &init)
}

/// Propagation from an arbitrary root sequence: a black node under a white
/// node with sequence `a` gets `min a + 1`, and its `i`-th white child gets
/// `a` with entry `i` replaced by that value.
pub fn algorithm1_with(c: &CodingTree, init: &[u32]) -> DistanceTable {
    let k = c.k();
    assert_eq!(init.len(), k, "root sequence must have k entries");
    let nodes = c.node_count();
    let mut dist = vec![UNKNOWN; nodes];
    let mut seqs = vec![UNKNOWN; nodes * k];
    seqs[..k].copy_from_slice(init);
    let max_label = c
        .root_front()
        .iter()
        .copied()
        .chain(c.black_nodes().map(|b| c.label(b)))
        .max()
        .unwrap_or(0);
    let mut by_label = vec![UNKNOWN; max_label + 1];
    for (&v, &a) in c.root_front().iter().zip(init) {
        by_label[v] = a;
    }
    let mut stack = vec![c.root()];
    while let Some(w) = stack.pop() {
        let base = w * k;
        let p = seqs[base..base + k].iter().copied().min().expect("k >= 1") + 1;
        for &b in c.children(w) {
            dist[b] = p;
            by_label[c.label(b)] = p;
            for (i, &child) in c.children(b).iter().enumerate() {
                seqs.copy_within(base..base + k, child * k);
                seqs[child * k + i] = p;
                stack.push(child);
            }
        }
    }
    DistanceTable {
        k,
        dist,
        seqs,
        by_label,
    }
}

/// Graph distances from `src` (`usize::MAX` where unreachable).
pub fn bfs_distances(g: &KTreeGraph, src: usize) -> Vec<usize> {
    g.bfs_from(&[src])
}

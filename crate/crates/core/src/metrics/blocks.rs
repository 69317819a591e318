//! Blocks: maximal groups of black nodes hanging below a white node with a
//! constant distance sequence (or the root), and the block distance δ.

use rand::seq::index::sample;
use rand::Rng;

use super::distance::DistanceTable;
use super::MetricsError;
use crate::trees::{CodingTree, KTreeGraph};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    block_of: Vec<usize>,
    roots: Vec<usize>,
    level: Vec<u32>,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    sizes: Vec<usize>,
    good: Vec<usize>,
    is_good: Vec<bool>,
}

impl BlockDecomposition {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Block of black node `b`.
    pub fn block_of(&self, b: usize) -> usize {
        self.block_of[b]
    }

    /// White node at which block `i` is rooted.
    pub fn root(&self, block: usize) -> usize {
        self.roots[block]
    }

    /// Distance from vertex 1 shared by all black nodes of the block.
    pub fn level(&self, block: usize) -> u32 {
        self.level[block]
    }

    pub fn parent(&self, block: usize) -> Option<usize> {
        self.parent[block]
    }

    pub fn size(&self, block: usize) -> usize {
        self.sizes[block]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Good nodes per block, including empty blocks.
    pub fn good_counts(&self) -> &[usize] {
        &self.good
    }

    pub fn is_good(&self, b: usize) -> bool {
        self.is_good[b]
    }
}

/// Splits black nodes into blocks. Block 0 is rooted at the white root;
/// every other white node with a constant sequence roots a new (possibly
/// empty) block whose parent is the block of its black parent.
pub fn block_decompose(c: &CodingTree, dt: &DistanceTable) -> BlockDecomposition {
    let nodes = c.node_count();
    let mut bd = BlockDecomposition {
        block_of: vec![NONE; nodes],
        roots: Vec::new(),
        level: Vec::new(),
        parent: Vec::new(),
        depth: Vec::new(),
        sizes: Vec::new(),
        good: Vec::new(),
        is_good: vec![false; nodes],
    };
    // white node, block of its black parent (none for the root)
    let mut stack: Vec<(usize, Option<usize>)> = vec![(c.root(), None)];
    let mut white_block = vec![NONE; nodes];
    while let Some((w, above)) = stack.pop() {
        let block = match above {
            Some(p) if !dt.is_constant(w) => p,
            _ => {
                let id = bd.roots.len();
                bd.roots.push(w);
                bd.level.push(dt.sequence(w).iter().min().copied().unwrap_or(0) + 1);
                bd.parent.push(above);
                bd.depth.push(above.map_or(0, |p| bd.depth[p] + 1));
                bd.sizes.push(0);
                bd.good.push(0);
                id
            }
        };
        white_block[w] = block;
        for &b in c.children(w) {
            bd.block_of[b] = block;
            bd.sizes[block] += 1;
            let good = c.children(b).iter().any(|&x| dt.is_constant(x));
            if good {
                bd.is_good[b] = true;
                bd.good[block] += 1;
            }
            for &x in c.children(b) {
                stack.push((x, Some(block)));
            }
        }
    }
    bd
}

/// Number of blocks on the block-tree path between the blocks of `x` and
/// `y`, minus one.
pub fn block_distance(bd: &BlockDecomposition, x: usize, y: usize) -> usize {
    let (mut a, mut b) = (bd.block_of[x], bd.block_of[y]);
    let mut steps = 0;
    while bd.depth[a] > bd.depth[b] {
        a = bd.parent[a].expect("deeper block has a parent");
        steps += 1;
    }
    while bd.depth[b] > bd.depth[a] {
        b = bd.parent[b].expect("deeper block has a parent");
        steps += 1;
    }
    while a != b {
        a = bd.parent[a].expect("distinct blocks meet below the root");
        b = bd.parent[b].expect("distinct blocks meet below the root");
        steps += 2;
    }
    steps
}

/// Histogram of `dist − δ` over pairs of black nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct DeltaHistogram {
    pub counts: [u64; 4],
}

impl DeltaHistogram {
    pub fn pairs(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn merge(&mut self, other: &DeltaHistogram) {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
    }
}

/// Root component of every black node (index of its ancestor among the
/// root's black children).
fn components(c: &CodingTree) -> Vec<usize> {
    let mut comp = vec![NONE; c.node_count()];
    for (i, &r) in c.children(c.root()).iter().enumerate() {
        let mut stack = vec![r];
        while let Some(v) = stack.pop() {
            comp[v] = i;
            stack.extend_from_slice(c.children(v));
        }
    }
    comp
}

/// Checks `dist − δ ∈ {0, 1, 2, 3}` on all pairs of black nodes in the same
/// root component, with `g = φ⁻¹(c)`.
pub fn check_dist_delta(
    g: &KTreeGraph,
    c: &CodingTree,
    bd: &BlockDecomposition,
) -> Result<DeltaHistogram, MetricsError> {
    let blacks: Vec<usize> = c.black_nodes().collect();
    check_from(g, c, bd, &blacks)
}

/// As [`check_dist_delta`] from `sources` random black nodes to all others.
pub fn check_dist_delta_sampled<R: Rng + ?Sized>(
    g: &KTreeGraph,
    c: &CodingTree,
    bd: &BlockDecomposition,
    sources: usize,
    rng: &mut R,
) -> Result<DeltaHistogram, MetricsError> {
    let blacks: Vec<usize> = c.black_nodes().collect();
    let picked: Vec<usize> = sample(rng, blacks.len(), sources.min(blacks.len()))
        .into_iter()
        .map(|i| blacks[i])
        .collect();
    check_from(g, c, bd, &picked)
}

fn check_from(
    g: &KTreeGraph,
    c: &CodingTree,
    bd: &BlockDecomposition,
    sources: &[usize],
) -> Result<DeltaHistogram, MetricsError> {
    let comp = components(c);
    let blacks: Vec<usize> = c.black_nodes().collect();
    let mut hist = DeltaHistogram::default();
    for &x in sources {
        let dist = g.bfs_from(&[c.label(x)]);
        let mut local = DeltaHistogram::default();
        for &y in &blacks {
            if y == x || comp[y] != comp[x] {
                continue;
            }
            let d = dist[c.label(y)];
            let delta = block_distance(bd, x, y);
            let i = d as i64 - delta as i64;
            if !(0..=3).contains(&i) {
                return Err(MetricsError::LemmaViolation {
                    x: c.label(x),
                    y: c.label(y),
                    dist: d,
                    delta,
                });
            }
            local.counts[i as usize] += 1;
        }
        hist.merge(&local);
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::algorithm1;
    use crate::trees::phi_inverse;

    #[test]
    fn two_hedra() {
        let mut c = CodingTree::new(2);
        let b3 = c.add_black(0, 3);
        let w = c.children(b3)[0];
        let b4 = c.add_black(w, 4);
        let bd = block_decompose(&c, &algorithm1(&c));
        assert_ne!(bd.block_of(b3), bd.block_of(b4));
        assert_eq!(block_distance(&bd, b3, b4), 1);
        assert_eq!(block_distance(&bd, b3, b3), 0);
        assert!(bd.is_good(b3));
        assert_eq!(bd.sizes().iter().sum::<usize>(), 2);
        let g = phi_inverse(&c).unwrap();
        let hist = check_dist_delta(&g, &c, &bd).unwrap();
        assert_eq!(hist.pairs(), 2);
    }

    #[test]
    fn single_hedron() {
        let mut c = CodingTree::new(3);
        c.add_black(0, 4);
        let bd = block_decompose(&c, &algorithm1(&c));
        assert_eq!(bd.size(0), 1);
        let g = phi_inverse(&c).unwrap();
        assert_eq!(check_dist_delta(&g, &c, &bd).unwrap().pairs(), 0);
    }
}

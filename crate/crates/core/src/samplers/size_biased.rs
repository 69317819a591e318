//! Size-biased enriched trees: a spine through `m` mutant blocks.
//!
//! Distance sequences start from `(0, 1, …, 1)` at the root. Along the spine
//! only the number of minimal entries matters. A spine white draws a
//! size-biased number of blacks and passes the spine to one of them
//! uniformly; a spine black passes it to a uniform white child. When the
//! parent sequence has a single minimal entry, the black is good, and moving
//! to the child at that position (which carries a constant sequence) makes
//! it the heir of its block. Each pair (tree, spine) then has probability
//! proportional to the Boltzmann weight of the tree.

use rand::Rng;

use crate::model::ModelParams;
use crate::pmf::PmfSampler;
use crate::trees::CodingTree;

/// How subtrees off the spine are grown.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlainGrowth {
    /// Independent Boltzmann subtrees; the draw is abandoned beyond `max_black`.
    Full { max_black: usize },
    /// Off-spine white nodes are left without children.
    Stub,
}

#[derive(Debug, Clone)]
pub struct SizeBiasedTree {
    pub tree: CodingTree,
    /// Spine black nodes from the root's black child down to the last heir.
    pub spine: Vec<usize>,
    /// The heir of each mutant block.
    pub heirs: Vec<usize>,
    /// Spine length inside each block, counted in black nodes.
    pub increments: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SizeBiasedSampler {
    k: usize,
    white: PmfSampler,
    biased: PmfSampler,
}

impl SizeBiasedSampler {
    pub fn new(params: &ModelParams) -> Self {
        let white = params.offspring_white();
        let biased = white.size_bias().expect("critical law has positive mean");
        SizeBiasedSampler {
            k: params.k,
            white: white.sampler(),
            biased: biased.sampler(),
        }
    }

    /// Builds a reduced tree with a spine through `blocks` mutant blocks;
    /// `None` if full growth exceeds its black budget.
    pub fn sample<R: Rng + ?Sized>(&self, blocks: usize, growth: PlainGrowth, rng: &mut R) -> Option<SizeBiasedTree> {
        assert!(blocks >= 1, "at least one mutant block");
        let k = self.k;
        let max_black = match growth {
            PlainGrowth::Full { max_black } => max_black,
            PlainGrowth::Stub => usize::MAX,
        };
        let mut tree = CodingTree::new(k);
        let mut plain: Vec<usize> = Vec::new();
        let mut spine = Vec::new();
        let mut heirs = Vec::new();
        let mut increments = Vec::new();

        let mut seq: Vec<u32> = (0..k).map(|i| u32::from(i > 0)).collect();
        let mut white = 0usize;
        let mut depth = 0usize;
        let mut first = true;
        loop {
            let j = if first { 1 } else { self.biased.sample(rng) };
            first = false;
            if tree.size() + j > max_black {
                return None;
            }
            let pick = rng.gen_range(0..j);
            let mut spine_black = 0;
            for t in 0..j {
                let b = tree.add_black(white, 0);
                if t == pick {
                    spine_black = b;
                } else {
                    plain.extend_from_slice(tree.children(b));
                }
            }
            spine.push(spine_black);
            depth += 1;
            let min = *seq.iter().min().expect("k >= 1");
            let lower = seq.iter().filter(|&&a| a == min).count();
            let c = rng.gen_range(0..k);
            let children = tree.children(spine_black).to_vec();
            for (i, &w) in children.iter().enumerate() {
                if i != c {
                    plain.push(w);
                }
            }
            let becomes_constant = lower == 1 && seq[c] == min;
            seq[c] = min + 1;
            white = children[c];
            if becomes_constant {
                heirs.push(spine_black);
                increments.push(depth);
                depth = 0;
                if heirs.len() == blocks {
                    plain.push(white);
                    break;
                }
            }
        }

        if let PlainGrowth::Full { .. } = growth {
            while let Some(w) = plain.pop() {
                let j = self.white.sample(rng);
                if tree.size() + j > max_black {
                    return None;
                }
                for _ in 0..j {
                    let b = tree.add_black(w, 0);
                    plain.extend_from_slice(tree.children(b));
                }
            }
        }
        tree.relabel_uniform(rng);
        Some(SizeBiasedTree {
            tree,
            spine,
            heirs,
            increments,
        })
    }
}

/// Spine lengths of `count` blocks whose roots carry constant sequences,
/// simulated on the number of minimal entries alone.
pub fn spine_increments<R: Rng + ?Sized>(k: usize, count: usize, rng: &mut R) -> Vec<usize> {
    (0..count).map(|_| block_increment(k, k, rng)).collect()
}

/// Spine length of the root block, whose sequence `(0, 1, …, 1)` has a single
/// minimal entry.
pub fn root_block_increment<R: Rng + ?Sized>(k: usize, rng: &mut R) -> usize {
    block_increment(k, 1, rng)
}

fn block_increment<R: Rng + ?Sized>(k: usize, mut lower: usize, rng: &mut R) -> usize {
    let mut depth = 0;
    loop {
        depth += 1;
        let c = rng.gen_range(0..k);
        if c < lower {
            if lower == 1 {
                return depth;
            }
            lower -= 1;
        }
    }
}

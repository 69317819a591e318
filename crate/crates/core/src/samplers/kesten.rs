//! The Kesten tree of the white plane tree, and lazily grown neighbourhoods
//! of the root clique in the infinite limit object.

use rand::Rng;

use crate::model::ModelParams;
use crate::pmf::PmfSampler;
use crate::trees::{CodingTree, PlaneTree};

/// A Kesten tree truncated at some height, with its spine.
#[derive(Debug, Clone)]
pub struct KestenTree {
    pub tree: PlaneTree,
    /// Spine node ids, one per height from the root.
    pub spine: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct KestenSampler {
    k: usize,
    white: PmfSampler,
    white_biased: PmfSampler,
    root: PmfSampler,
    root_biased: PmfSampler,
}

impl KestenSampler {
    pub fn new(params: &ModelParams) -> Self {
        let white = params.offspring_white();
        let root = params.root_law();
        KestenSampler {
            k: params.k,
            white_biased: white.size_bias().expect("critical law has positive mean").sampler(),
            white: white.sampler(),
            root_biased: root.size_bias().expect("root law has positive mean").sampler(),
            root: root.sampler(),
        }
    }

    /// The plane tree up to height `h`. Ordinary nodes have `k ξ°` children;
    /// spine nodes have size-biased offspring (from `η` at the root), one of
    /// which, chosen uniformly, continues the spine.
    pub fn plane<R: Rng + ?Sized>(&self, h: usize, rng: &mut R) -> KestenTree {
        let k = self.k;
        let mut tree = PlaneTree::single();
        let mut spine = vec![0];
        let mut level = vec![0usize];
        for depth in 0..h {
            let mut next = Vec::new();
            for &v in &level {
                let on_spine = spine[depth] == v;
                let j = match (on_spine, depth) {
                    (true, 0) => self.root_biased.sample(rng),
                    (true, _) => self.white_biased.sample(rng),
                    (false, 0) => self.root.sample(rng),
                    (false, _) => self.white.sample(rng),
                };
                let first = tree.len();
                for _ in 0..k * j {
                    next.push(tree.add_child(v));
                }
                if on_spine {
                    spine.push(first + rng.gen_range(0..k * j));
                }
            }
            level = next;
        }
        KestenTree { tree, spine }
    }

    /// The coding tree of all hedra within front distance `ell` of the root
    /// clique, or `None` if it would exceed `max_black` black nodes.
    pub fn neighborhood<R: Rng + ?Sized>(&self, ell: usize, max_black: usize, rng: &mut R) -> Option<CodingTree> {
        let k = self.k;
        let mut tree = CodingTree::new(k);
        // (white, front distances, on spine)
        let mut stack: Vec<(usize, Vec<usize>, bool)> = vec![(0, vec![0; k], true)];
        while let Some((w, seq, mutant)) = stack.pop() {
            let min = *seq.iter().min().expect("k >= 1");
            if min + 1 > ell {
                continue;
            }
            let j = match (mutant, w == 0) {
                (true, true) => self.root_biased.sample(rng),
                (true, false) => self.white_biased.sample(rng),
                (false, true) => self.root.sample(rng),
                (false, false) => self.white.sample(rng),
            };
            if tree.size() + j > max_black {
                return None;
            }
            let heir = if mutant { Some(rng.gen_range(0..k * j)) } else { None };
            for t in 0..j {
                let b = tree.add_black(w, 0);
                for (c, &child) in tree.children(b).iter().enumerate() {
                    let mut s = seq.clone();
                    s[c] = min + 1;
                    stack.push((child, s, heir == Some(t * k + c)));
                }
            }
        }
        Some(tree)
    }
}

/// Removes every black node whose front distance from the root clique
/// exceeds `ell` (together with its subtree), keeping node order.
pub fn prune_to_ball(tree: &CodingTree, ell: usize) -> CodingTree {
    let k = tree.k();
    let mut out = CodingTree::with_root_front(tree.root_front().to_vec());
    let mut stack: Vec<(usize, usize, Vec<usize>)> = vec![(tree.root(), out.root(), vec![0; k])];
    while let Some((w, w_out, seq)) = stack.pop() {
        let min = *seq.iter().min().expect("k >= 1");
        if min + 1 > ell {
            continue;
        }
        for &b in tree.children(w) {
            let b_out = out.add_black(w_out, tree.label(b));
            let whites_out = out.children(b_out).to_vec();
            for (c, (&child, &child_out)) in tree.children(b).iter().zip(&whites_out).enumerate() {
                let mut s = seq.clone();
                s[c] = min + 1;
                stack.push((child, child_out, s));
            }
        }
    }
    out
}

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::Rng;

use crate::model::ModelParams;
use crate::pmf::PmfSampler;
use crate::trees::CodingTree;

/// Default hard cap on coding-tree nodes per Boltzmann draw.
pub const DEFAULT_NODE_CAP: usize = 10_000_000;

/// Critical Boltzmann samplers for reduced (`ΓB`) and unreduced (`ΓC`)
/// coding trees. Every white node other than the root receives an
/// independent ξ° number of black children; every black node receives `k`
/// white children. Labels are a uniform permutation assigned at the end.
#[derive(Debug)]
pub struct BoltzmannSampler {
    k: usize,
    white: PmfSampler,
    root: PmfSampler,
    node_cap: usize,
    aborts: AtomicUsize,
}

impl Clone for BoltzmannSampler {
    fn clone(&self) -> Self {
        BoltzmannSampler {
            k: self.k,
            white: self.white.clone(),
            root: self.root.clone(),
            node_cap: self.node_cap,
            aborts: AtomicUsize::new(self.aborts()),
        }
    }
}

impl BoltzmannSampler {
    pub fn new(params: &ModelParams) -> Self {
        BoltzmannSampler {
            k: params.k,
            white: params.offspring_white().sampler(),
            root: params.root_law().sampler(),
            node_cap: DEFAULT_NODE_CAP,
            aborts: AtomicUsize::new(0),
        }
    }

    pub fn with_node_cap(mut self, cap: usize) -> Self {
        self.node_cap = cap.max(self.k + 2);
        self
    }

    /// Number of draws abandoned at the node cap so far.
    pub fn aborts(&self) -> usize {
        self.aborts.load(Ordering::Relaxed)
    }

    fn black_cap(&self) -> usize {
        (self.node_cap - 1) / (self.k + 1)
    }

    /// Reduced tree: the root has exactly one black child.
    pub fn sample_b<R: Rng + ?Sized>(&self, rng: &mut R) -> CodingTree {
        loop {
            if let Some(t) = self.try_sample_b(rng, self.black_cap()) {
                return t;
            }
            self.aborts.fetch_add(1, Ordering::Relaxed);
        }
    }

    /// Unreduced tree: the root has η° black children.
    pub fn sample_c<R: Rng + ?Sized>(&self, rng: &mut R) -> CodingTree {
        loop {
            if let Some(t) = self.try_sample_c(rng, self.black_cap()) {
                return t;
            }
            self.aborts.fetch_add(1, Ordering::Relaxed);
        }
    }

    /// One draw of `ΓB`, abandoned (`None`) once it exceeds `max_black` blacks.
    pub fn try_sample_b<R: Rng + ?Sized>(&self, rng: &mut R, max_black: usize) -> Option<CodingTree> {
        self.grow(rng, max_black, Some(1))
    }

    pub fn try_sample_c<R: Rng + ?Sized>(&self, rng: &mut R, max_black: usize) -> Option<CodingTree> {
        self.grow(rng, max_black, None)
    }

    fn grow<R: Rng + ?Sized>(&self, rng: &mut R, max_black: usize, root_degree: Option<usize>) -> Option<CodingTree> {
        let mut tree = CodingTree::new(self.k);
        let mut stack: Vec<usize> = vec![0];
        let mut first = true;
        while let Some(w) = stack.pop() {
            let j = if first {
                first = false;
                root_degree.unwrap_or_else(|| self.root.sample(rng))
            } else {
                self.white.sample(rng)
            };
            if tree.size() + j > max_black {
                return None;
            }
            for _ in 0..j {
                let b = tree.add_black(w, 0);
                stack.extend_from_slice(tree.children(b));
            }
        }
        tree.relabel_uniform(rng);
        Some(tree)
    }

    /// One block of a Boltzmann tree: the root white node carries a constant
    /// distance sequence and receives ξ° black children, and growth stops at
    /// white nodes whose sequence becomes constant again. Labels are left
    /// unassigned.
    pub fn try_sample_block<R: Rng + ?Sized>(&self, rng: &mut R, max_black: usize) -> Option<CodingTree> {
        let k = self.k;
        let mut tree = CodingTree::new(k);
        let mut stack: Vec<(usize, Vec<u32>)> = vec![(0, vec![0; k])];
        while let Some((w, seq)) = stack.pop() {
            let j = self.white.sample(rng);
            if tree.size() + j > max_black {
                return None;
            }
            let p = seq.iter().copied().min().expect("k >= 1") + 1;
            for _ in 0..j {
                let b = tree.add_black(w, 0);
                for (i, &c) in tree.children(b).iter().enumerate() {
                    let mut s = seq.clone();
                    s[i] = p;
                    if s.iter().any(|&a| a != s[0]) {
                        stack.push((c, s));
                    }
                }
            }
        }
        Some(tree)
    }

    /// Size of a `ΓB` draw without building it; `None` beyond `max_black`.
    pub fn size_b<R: Rng + ?Sized>(&self, rng: &mut R, max_black: usize) -> Option<usize> {
        self.count(rng, max_black, 1, self.k)
    }

    /// Size of a `ΓC` draw without building it; `None` beyond `max_black`.
    pub fn size_c<R: Rng + ?Sized>(&self, rng: &mut R, max_black: usize) -> Option<usize> {
        let i = self.root.sample(rng);
        self.count(rng, max_black, i, self.k * i)
    }

    fn count<R: Rng + ?Sized>(&self, rng: &mut R, max_black: usize, start: usize, whites: usize) -> Option<usize> {
        let mut size = start;
        if size > max_black {
            return None;
        }
        let mut pending = whites;
        while pending > 0 {
            let j = self.white.sample(rng);
            size += j;
            if size > max_black {
                return None;
            }
            pending = pending - 1 + self.k * j;
        }
        Some(size)
    }
}

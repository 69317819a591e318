use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::{BoltzmannSampler, SamplerError};
use crate::model::{DegreeSet, ModelParams};
use crate::pmf::{log_power_probs, DiscretePmf, PmfSampler};
use crate::trees::{psi, CodingTree, PlaneTree};

/// Default number of Boltzmann draws before rejection sampling gives up.
pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Boltzmann draws until the size is exactly `n`.
    Rejection,
    /// Conditioned degree sequence plus a cyclic rotation.
    Exact,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rejection" | "a" | "A" => Ok(Strategy::Rejection),
            "exact" | "b" | "B" => Ok(Strategy::Exact),
            _ => Err(format!("unknown strategy {s:?} (expected rejection|exact)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Rejection => "rejection",
            Strategy::Exact => "exact",
        })
    }
}

/// Which coding trees are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootMode {
    /// Root outdegree in Ω (uniform front-rooted Ω-k-trees).
    Free,
    /// Root with exactly one black child.
    Reduced,
}

/// Uniform sampler of coding trees with exactly `n` black nodes.
///
/// The exact strategy works on the white plane tree with `kn + 1` vertices.
/// The root's black count `i` is drawn from its conditional law
/// `∝ P(η° = i) · i · P(S_{kn} = n − i)`, where `S_{kn}` sums `kn` copies of ξ°
/// (this is the cycle-lemma count of valid arrangements). The remaining `kn`
/// black counts are drawn as a multinomial count vector conditioned on their
/// sum, shuffled, and rotated to one of the `ki` rotations that encode a
/// forest. Grouping children by `k` and a uniform labelling finish the tree.
#[derive(Debug, Clone)]
pub struct ConditionedSampler {
    k: usize,
    n: usize,
    mode: RootMode,
    white: DiscretePmf,
    root_values: Vec<usize>,
    root_probs: Vec<f64>,
    root: PmfSampler,
    boltzmann: BoltzmannSampler,
    max_attempts: usize,
}

/// Sums in `0..=n` reachable as finite sums of members of `set`.
pub(crate) fn reachable_sums(set: &DegreeSet, n: usize) -> Vec<bool> {
    let steps: Vec<usize> = set.members_upto(n).into_iter().filter(|&j| j > 0).collect();
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for s in 1..=n {
        reach[s] = steps.iter().any(|&j| j <= s && reach[s - j]);
    }
    reach
}

impl ConditionedSampler {
    pub fn new(params: &ModelParams, n: usize, mode: RootMode) -> Result<Self, SamplerError> {
        if n == 0 {
            return Err(SamplerError::InfeasibleSize { n });
        }
        let k = params.k;
        let reach = reachable_sums(&params.omega_out(), n);
        let candidates: Vec<usize> = match mode {
            RootMode::Reduced => vec![1],
            RootMode::Free => params
                .omega
                .as_set()
                .members_upto(n)
                .into_iter()
                .filter(|&i| i >= 1)
                .collect(),
        };
        let feasible: Vec<usize> = candidates.into_iter().filter(|&i| reach[n - i]).collect();
        if feasible.is_empty() {
            return Err(SamplerError::InfeasibleSize { n });
        }
        let white = params.offspring_white();
        let root_law = params.root_law();
        let log_sum = log_power_probs(white.probs(), k * n, n - 1);
        let logs: Vec<f64> = feasible
            .iter()
            .map(|&i| root_law.prob(i).ln() + (i as f64).ln() + log_sum[n - i])
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(SamplerError::InfeasibleSize { n });
        }
        let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = weights.iter().sum();
        let root_probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let root = DiscretePmf::from_probs(root_probs.clone()).sampler();
        Ok(ConditionedSampler {
            k,
            n,
            mode,
            white,
            root_values: feasible,
            root_probs,
            root,
            boltzmann: BoltzmannSampler::new(params),
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        })
    }

    pub fn with_max_attempts(mut self, attempts: usize) -> Self {
        self.max_attempts = attempts.max(1);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> RootMode {
        self.mode
    }

    /// Conditional law of the root's black count, as `(i, probability)`.
    pub fn root_law(&self) -> Vec<(usize, f64)> {
        self.root_values
            .iter()
            .copied()
            .zip(self.root_probs.iter().copied())
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, strategy: Strategy) -> Result<CodingTree, SamplerError> {
        match strategy {
            Strategy::Exact => Ok(self.sample_exact(rng)),
            Strategy::Rejection => self.sample_rejection(rng),
        }
    }

    pub fn sample_exact<R: Rng + ?Sized>(&self, rng: &mut R) -> CodingTree {
        let plane = self.sample_plane(rng);
        let mut tree = psi(&plane, self.k).expect("outdegrees are multiples of k");
        tree.relabel_uniform(rng);
        tree
    }

    /// Repeated Boltzmann draws, each abandoned as soon as it exceeds `n`.
    pub fn sample_rejection<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CodingTree, SamplerError> {
        for _ in 0..self.max_attempts {
            let draw = match self.mode {
                RootMode::Free => self.boltzmann.try_sample_c(rng, self.n),
                RootMode::Reduced => self.boltzmann.try_sample_b(rng, self.n),
            };
            if let Some(t) = draw {
                if t.size() == self.n {
                    return Ok(t);
                }
            }
        }
        Err(SamplerError::StrategyTimeout {
            attempts: self.max_attempts,
        })
    }

    /// The white plane tree with `kn + 1` vertices (outdegrees `k` times the
    /// black counts).
    pub fn sample_plane<R: Rng + ?Sized>(&self, rng: &mut R) -> PlaneTree {
        let seq = self.sample_white_sequence(rng);
        let degrees: Vec<usize> = seq.iter().map(|&j| j * self.k).collect();
        PlaneTree::from_preorder_degrees(&degrees).expect("rotation yields a valid tree")
    }

    /// Black counts of the white nodes in preorder, root first.
    pub fn sample_white_sequence<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let i = self.root_values[self.root.sample(rng)];
        let m = self.k * self.n;
        let mut seq = self.conditioned_sequence(rng, m, self.n - i);
        let s = good_rotation(&seq, self.k, self.k * i, rng);
        seq.rotate_left(s);
        let mut out = Vec::with_capacity(m + 1);
        out.push(i);
        out.extend(seq);
        out
    }

    /// `m` i.i.d. ξ° values conditioned on summing to `target`, in uniformly
    /// random order: multinomial count vectors by sequential binomials,
    /// rejected until the sum matches.
    fn conditioned_sequence<R: Rng + ?Sized>(&self, rng: &mut R, m: usize, target: usize) -> Vec<usize> {
        let probs = self.white.probs();
        let mut counts = vec![0usize; probs.len()];
        loop {
            let mut left = m as u64;
            let mut mass = 1.0f64;
            let mut sum = 0usize;
            let mut ok = true;
            for (j, &p) in probs.iter().enumerate() {
                if left == 0 {
                    counts[j] = 0;
                    continue;
                }
                let c = if j + 1 == probs.len() || p >= mass {
                    left
                } else if p <= 0.0 {
                    0
                } else {
                    Binomial::new(left, (p / mass).min(1.0))
                        .expect("valid binomial")
                        .sample(rng)
                };
                counts[j] = c as usize;
                left -= c;
                mass -= p;
                sum += j * c as usize;
                if sum > target {
                    ok = false;
                    break;
                }
            }
            if ok && sum == target {
                break;
            }
        }
        let mut seq = Vec::with_capacity(m);
        for (j, &c) in counts.iter().enumerate() {
            seq.extend(std::iter::repeat_n(j, c));
        }
        seq.shuffle(rng);
        seq
    }
}

/// Picks uniformly one of the `r` rotations of `seq` that encode a forest of
/// `r` trees, where node `t` has `k · seq[t]` children. With the walk
/// `S_t = Σ_{u ≤ t} (k seq[u] − 1)` ending at `−r` and minimum `μ`, the good
/// rotations start right after the first hitting times of `μ, …, μ + r − 1`.
pub fn good_rotation<R: Rng + ?Sized>(seq: &[usize], k: usize, r: usize, rng: &mut R) -> usize {
    good_rotations(seq, k, r)[rng.gen_range(0..r)]
}

/// All good rotation offsets (see [`good_rotation`]), ordered by level.
pub fn good_rotations(seq: &[usize], k: usize, r: usize) -> Vec<usize> {
    let m = seq.len();
    let mut walk = 0i64;
    let mut min = i64::MAX;
    // first[d] = first time the walk reaches −(d + 1)
    let mut first: Vec<usize> = Vec::new();
    for (t, &j) in seq.iter().enumerate() {
        walk += (k * j) as i64 - 1;
        if walk < min {
            min = walk;
            if walk < 0 && first.len() < (-walk) as usize {
                first.push(t + 1);
            }
        }
    }
    debug_assert_eq!(walk, -(r as i64), "sequence sum must match the forest size");
    let depth = (-min) as usize;
    (depth - r..depth).map(|d| first[d] % m.max(1)).collect()
}

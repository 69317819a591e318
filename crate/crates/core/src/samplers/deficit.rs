//! Size deficit of the largest component hanging off the root front.
//!
//! In an unreduced coding tree each black child of the root spans one
//! reduced component. The deficit is `n` minus the largest component size.

use crate::model::ModelParams;
use crate::pmf::log_power_probs;
use crate::trees::CodingTree;

/// Component sizes from the preorder black counts of the white plane tree
/// (root first, node `t` having `k · seq[t]` children).
pub fn component_sizes(seq: &[usize], k: usize) -> Vec<usize> {
    let Some(&i) = seq.first() else {
        return Vec::new();
    };
    let mut sizes = Vec::with_capacity(i);
    let mut pos = 1;
    for _ in 0..i {
        let mut size = 1;
        for _ in 0..k {
            let (len, blacks) = subtree_extent(seq, pos, k);
            size += blacks;
            pos += len;
        }
        sizes.push(size);
    }
    sizes
}

/// Length and black total of the preorder subtree starting at `start`.
fn subtree_extent(seq: &[usize], start: usize, k: usize) -> (usize, usize) {
    let mut pending = 1usize;
    let mut pos = start;
    let mut blacks = 0;
    while pending > 0 {
        let j = seq[pos];
        blacks += j;
        pending = pending - 1 + k * j;
        pos += 1;
    }
    (pos - start, blacks)
}

pub fn deficit_from_sequence(seq: &[usize], k: usize) -> usize {
    let n: usize = seq.iter().sum();
    n - component_sizes(seq, k).into_iter().max().unwrap_or(0)
}

pub fn component_sizes_of_tree(tree: &CodingTree) -> Vec<usize> {
    tree.children(tree.root())
        .iter()
        .map(|&b| {
            let mut count = 0;
            let mut stack = vec![b];
            while let Some(v) = stack.pop() {
                if tree.is_black(v) {
                    count += 1;
                }
                stack.extend_from_slice(tree.children(v));
            }
            count
        })
        .collect()
}

pub fn deficit_of_tree(tree: &CodingTree) -> usize {
    tree.size() - component_sizes_of_tree(tree).into_iter().max().unwrap_or(0)
}

/// Exact law `P(deficit = d)` for `d < n/2` (where the largest component is
/// unique), from the Boltzmann decomposition into one reduced component of
/// size `n − d` and a remainder rooted at a white node.
pub fn deficit_law(params: &ModelParams, n: usize, dmax: usize) -> Vec<f64> {
    assert!(2 * dmax < n, "deficit law needs d < n/2");
    let k = params.k;
    let white = params.offspring_white();
    let probs = white.probs();
    let root = params.root_law();

    let ln_p_c = {
        let lp = log_power_probs(probs, k * n, n);
        let terms: Vec<f64> = root
            .support()
            .filter(|&i| i >= 1 && i <= n)
            .map(|i| root.prob(i).ln() + (i as f64 / n as f64).ln() + lp[n - i])
            .collect();
        log_sum_exp(&terms)
    };
    let ln_norm = params.c_rho.ln() + ln_p_c;

    (0..=dmax)
        .map(|d| {
            let ell = n - d;
            let ln_b = params.b_rho.ln() + log_power_probs(probs, k * ell, ell - 1)[ell - 1] - (ell as f64).ln();
            let ln_w = params.c_circ_rho.ln() + log_power_probs(probs, k * d + 1, d)[d] - ((k * d + 1) as f64).ln();
            (ln_b + ln_w - ln_norm).exp()
        })
        .collect()
}

/// `P(deficit ≥ t)` for `t ≤ n/2`.
pub fn deficit_tail(params: &ModelParams, n: usize, t: usize) -> f64 {
    if t == 0 {
        return 1.0;
    }
    let below: f64 = deficit_law(params, n, t - 1).iter().sum();
    (1.0 - below).max(0.0)
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

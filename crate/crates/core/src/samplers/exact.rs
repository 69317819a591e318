//! Exhaustive enumeration of small coding trees, used as a uniformity oracle.

use std::collections::HashSet;

use super::SamplerError;
use crate::model::ModelParams;
use crate::trees::{psi, CodingTree, PlaneTree};

pub const DEFAULT_ENUMERATION_CAP: usize = 6;

/// Preorder black-count sequences of all plane white trees with `n` blacks
/// whose root count lies in `root_allowed` and other counts in Ω_out.
fn plane_sequences(params: &ModelParams, n: usize, reduced: bool) -> Vec<Vec<usize>> {
    let k = params.k;
    let out = params.omega_out().members_upto(n);
    let roots: Vec<usize> = if reduced {
        vec![1]
    } else {
        params.omega.as_set().members_upto(n)
    };
    let mut result = Vec::new();
    let mut seq = Vec::new();
    for r in roots {
        seq.clear();
        seq.push(r);
        extend(&mut seq, k * r, r, n, k, &out, &mut result);
    }
    result
}

fn extend(
    seq: &mut Vec<usize>,
    pending: usize,
    used: usize,
    n: usize,
    k: usize,
    out: &[usize],
    result: &mut Vec<Vec<usize>>,
) {
    if pending == 0 {
        if used == n {
            result.push(seq.clone());
        }
        return;
    }
    for &j in out {
        if used + j > n {
            break;
        }
        seq.push(j);
        extend(seq, pending - 1 + k * j, used + j, n, k, out, result);
        seq.pop();
    }
}

/// Every labelled coding tree with `n` black nodes and root front `1..=k`,
/// each exactly once, sorted by [`CodingTree::labelled_key`].
pub fn exact_small_sampler(params: &ModelParams, n: usize) -> Result<Vec<CodingTree>, SamplerError> {
    enumerate(params, n, false, DEFAULT_ENUMERATION_CAP)
}

/// As [`exact_small_sampler`] for reduced trees only.
pub fn exact_small_reduced(params: &ModelParams, n: usize) -> Result<Vec<CodingTree>, SamplerError> {
    enumerate(params, n, true, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate(params: &ModelParams, n: usize, reduced: bool, cap: usize) -> Result<Vec<CodingTree>, SamplerError> {
    if n > cap {
        return Err(SamplerError::CapExceeded { n, cap });
    }
    let k = params.k;
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for seq in plane_sequences(params, n, reduced) {
        let degrees: Vec<usize> = seq.iter().map(|&j| j * k).collect();
        let plane = PlaneTree::from_preorder_degrees(&degrees).expect("enumerated sequences are valid");
        let shape = psi(&plane, k).expect("outdegrees are multiples of k");
        for perm in &perms {
            let labels: Vec<usize> = perm.iter().map(|&p| p + k + 1).collect();
            let mut t = shape.clone();
            t.assign_labels(&labels);
            let t = t.normalized();
            if seen.insert(t.labelled_key()) {
                out.push(t);
            }
        }
    }
    out.sort_by_cached_key(|t| t.labelled_key());
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut current, &mut out);
    out
}

fn heap_permute(len: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if len <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..len - 1 {
        heap_permute(len - 1, a, out);
        if len.is_multiple_of(2) {
            a.swap(i, len - 1);
        } else {
            a.swap(0, len - 1);
        }
    }
    heap_permute(len - 1, a, out);
}

//! Balls `U_ℓ` around the root front and the local distance between rooted
//! graphs.

use serde::Serialize;

use super::MetricsError;
use crate::samplers::prune_to_ball;
use crate::trees::{phi, CodingTree, KTreeGraph};

/// Orderings tried by the generic canonical form before giving up.
pub const GENERIC_ORDER_CAP: u64 = 2_000_000;

/// Distance of every vertex to the root front (minimum over its vertices).
pub fn front_distances(g: &KTreeGraph) -> Vec<usize> {
    g.bfs_from(g.root_front())
}

/// Induced subgraph on the vertices within distance `ell` of the root front.
pub fn ball(g: &KTreeGraph, ell: usize) -> KTreeGraph {
    let dist = front_distances(g);
    let keep: Vec<bool> = dist.iter().map(|&d| d <= ell).collect();
    g.induced(&keep)
}

/// Canonical code of `U_ℓ`, invariant under relabelling and under
/// reordering of the root front.
pub fn neighborhood(g: &KTreeGraph, ell: usize) -> Result<Vec<u8>, MetricsError> {
    let u = ball(g, ell);
    match phi(&u) {
        Ok(c) => Ok(ktree_code(&c)),
        Err(_) => generic_code(&u),
    }
}

/// Same code as [`neighborhood`] of `φ⁻¹(c)`, computed on the coding tree.
pub fn neighborhood_from_coding(c: &CodingTree, ell: usize) -> Vec<u8> {
    ktree_code(&prune_to_ball(c, ell))
}

/// Coding-tree shape code minimised over orderings of the root front.
pub fn ktree_code(c: &CodingTree) -> Vec<u8> {
    let mut perm: Vec<usize> = (0..c.k()).collect();
    let mut best = c.shape_code_permuted(&perm);
    while next_permutation(&mut perm) {
        let code = c.shape_code_permuted(&perm);
        if code < best {
            best = code;
        }
    }
    let mut out = Vec::with_capacity(best.len() + 1);
    out.push(b'K');
    out.extend(best);
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Minimum adjacency string over all vertex orders that list the front
/// first and then the distance layers in turn.
fn generic_code(g: &KTreeGraph) -> Result<Vec<u8>, MetricsError> {
    let dist = front_distances(g);
    let top = dist
        .iter()
        .skip(1)
        .copied()
        .filter(|&d| d != usize::MAX)
        .max()
        .unwrap_or(0);
    let mut layers: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
    for v in 1..=g.vertex_count() {
        if dist[v] != usize::MAX {
            layers[dist[v]].push(v);
        }
    }
    let orders: u64 = layers.iter().map(|l| (1..=l.len() as u64).product::<u64>()).product();
    if orders > GENERIC_ORDER_CAP {
        return Err(MetricsError::TooLarge {
            points: g.vertex_count(),
            cap: GENERIC_ORDER_CAP as usize,
        });
    }
    let mut best: Option<Vec<u8>> = None;
    let mut order = Vec::new();
    search_orders(g, &mut layers, 0, &mut order, &mut best);
    let mut out = vec![b'G'];
    out.extend(layers.iter().map(|l| l.len() as u8));
    out.extend(best.unwrap_or_default());
    Ok(out)
}

fn search_orders(
    g: &KTreeGraph,
    layers: &mut [Vec<usize>],
    at: usize,
    order: &mut Vec<usize>,
    best: &mut Option<Vec<u8>>,
) {
    if at == layers.len() {
        let mut bits = Vec::with_capacity(order.len() * order.len() / 2);
        for (i, &u) in order.iter().enumerate() {
            for &v in &order[i + 1..] {
                bits.push(u8::from(g.has_edge(u, v)));
            }
        }
        if best.as_ref().is_none_or(|b| bits < *b) {
            *best = Some(bits);
        }
        return;
    }
    let mut layer = layers[at].clone();
    layer.sort_unstable();
    loop {
        let len = order.len();
        order.extend_from_slice(&layer);
        search_orders(g, layers, at + 1, order, best);
        order.truncate(len);
        if !next_permutation(&mut layer) {
            break;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalDistance {
    /// `2^{−m}` for the largest agreeing radius `m`, or `1` when even the
    /// fronts differ.
    pub value: f64,
    pub agree_upto: Option<usize>,
    /// Every radius up to the cap agreed, so `value` is an upper bound.
    pub saturated: bool,
}

/// `2^{−sup m}` over radii `m ≤ cap` with `U_m(g) ≅ U_m(h)`.
pub fn local_metric(g: &KTreeGraph, h: &KTreeGraph, cap: usize) -> Result<LocalDistance, MetricsError> {
    let mut agree = None;
    for m in 0..=cap {
        if neighborhood(g, m)? != neighborhood(h, m)? {
            break;
        }
        agree = Some(m);
    }
    Ok(LocalDistance {
        value: agree.map_or(1.0, |m| 0.5f64.powi(m as i32)),
        agree_upto: agree,
        saturated: agree == Some(cap),
    })
}

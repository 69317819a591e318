use std::collections::VecDeque;

use super::{CodingTree, KTreeGraph, PlaneTree, TreeError};

/// Graph of a coding tree: each black node with label `v` under front
/// `(a_1..a_k)` contributes the edges `v–a_j`; the root front is a clique.
pub fn phi_inverse(c: &CodingTree) -> Result<KTreeGraph, TreeError> {
    c.validate_structure()?;
    if !c.is_labelled() {
        return Err(TreeError::InvalidCodingTree("black nodes are unlabelled".into()));
    }
    let k = c.k();
    let n_vertices = c.size() + k;
    let mut adj = vec![Vec::new(); n_vertices + 1];
    let front = c.root_front();
    for (i, &u) in front.iter().enumerate() {
        for &v in &front[i + 1..] {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let fronts = c.front_tuples();
    for b in c.black_nodes() {
        let w = c.parent(b).expect("black nodes have parents");
        let v = c.label(b);
        for &a in &fronts[w * k..w * k + k] {
            adj[v].push(a);
            adj[a].push(v);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Ok(KTreeGraph::from_adjacency(k, adj, front.to_vec()))
}

/// Coding tree of a front-rooted k-tree, built breadth-first over fronts.
///
/// The hedra containing a front `F` are `F ∪ {v}` for the common neighbours
/// `v` of `F`; the hedron through which `F` was reached is skipped.
pub fn phi(g: &KTreeGraph) -> Result<CodingTree, TreeError> {
    g.check_ktree()?;
    let mut tree = CodingTree::with_root_front(g.root_front().to_vec());
    // (white node, its front, vertex excluded because it closes the parent hedron)
    let mut queue: VecDeque<(usize, Vec<usize>, usize)> = VecDeque::new();
    queue.push_back((0, g.root_front().to_vec(), 0));
    let mut common = Vec::new();
    while let Some((w, front, excluded)) = queue.pop_front() {
        common.clear();
        common.extend(
            g.neighbors(front[0])
                .iter()
                .copied()
                .filter(|&v| v != excluded && front[1..].iter().all(|&a| g.has_edge(a, v))),
        );
        for &v in &common {
            if tree.size() >= g.hedra() {
                return Err(TreeError::NotAKTree("more hedra than vertices allow".into()));
            }
            let b = tree.add_black(w, v);
            for (i, &child) in tree.children(b).to_vec().iter().enumerate() {
                let mut f = front.clone();
                let replaced = f[i];
                f[i] = v;
                queue.push_back((child, f, replaced));
            }
        }
    }
    if tree.size() != g.hedra() {
        return Err(TreeError::NotAKTree(format!(
            "found {} hedra, expected {}",
            tree.size(),
            g.hedra()
        )));
    }
    tree.sort_children();
    Ok(tree)
}

/// Coding-tree shape of a plane tree whose outdegrees are multiples of `k`:
/// each run of `k` consecutive children is grouped under a new black node.
pub fn psi(t: &PlaneTree, k: usize) -> Result<CodingTree, TreeError> {
    for v in 0..t.len() {
        if !t.outdegree(v).is_multiple_of(k) {
            return Err(TreeError::BadOutdegree {
                node: v,
                degree: t.outdegree(v),
            });
        }
    }
    let mut c = CodingTree::with_capacity(k, (t.len() - 1) / k);
    let mut stack = vec![(0usize, 0usize)];
    while let Some((v, white)) = stack.pop() {
        for group in t.children(v).chunks(k) {
            let b = c.add_black(white, 0);
            let whites = c.children(b).to_vec();
            for (&pv, &cw) in group.iter().zip(&whites) {
                stack.push((pv, cw));
            }
        }
    }
    Ok(c)
}

/// Contracts every black node, concatenating its white children into the
/// grandparent's child list.
pub fn psi_inverse(c: &CodingTree) -> PlaneTree {
    let mut t = PlaneTree::single();
    let mut stack = vec![(0usize, 0usize)];
    while let Some((white, pv)) = stack.pop() {
        for &b in c.children(white) {
            for &cw in c.children(b) {
                let child = t.add_child(pv);
                stack.push((cw, child));
            }
        }
    }
    t
}

/// Tree on the black nodes, each attached to its grandparent black node.
#[derive(Debug, Clone)]
pub struct BlackTree {
    pub tree: PlaneTree,
    /// Coding-tree node of every tree node; the virtual root maps to `None`.
    pub coding_node: Vec<Option<usize>>,
    /// Set when the coding tree is not reduced and a virtual root joins the
    /// black children of the white root.
    pub virtual_root: bool,
}

impl BlackTree {
    /// Nodes that correspond to black nodes.
    pub fn real_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.tree.len()).filter(|&v| self.coding_node[v].is_some())
    }
}

pub fn black_tree(c: &CodingTree) -> BlackTree {
    let roots = c.children(0);
    let virtual_root = roots.len() != 1;
    let mut tree = PlaneTree::single();
    let mut coding_node = Vec::with_capacity(c.size() + 1);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    if virtual_root {
        coding_node.push(None);
        for &b in roots {
            let id = tree.add_child(0);
            coding_node.push(Some(b));
            stack.push((b, id));
        }
    } else {
        coding_node.push(Some(roots[0]));
        stack.push((roots[0], 0));
    }
    while let Some((b, id)) = stack.pop() {
        for &w in c.children(b) {
            for &child in c.children(w) {
                let cid = tree.add_child(id);
                coding_node.push(Some(child));
                stack.push((child, cid));
            }
        }
    }
    BlackTree {
        tree,
        coding_node,
        virtual_root,
    }
}

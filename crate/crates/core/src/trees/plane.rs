use std::collections::VecDeque;

use super::canon::{canonical_code, canonical_code_by};
use super::TreeError;

/// Ordered rooted tree; node 0 is the root. Equality is structural and
/// ignores node numbering.
#[derive(Debug, Clone)]
pub struct PlaneTree {
    children: Vec<Vec<usize>>,
    parent: Vec<usize>,
}

impl PartialEq for PlaneTree {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.preorder_degrees() == other.preorder_degrees()
    }
}

impl Eq for PlaneTree {}

impl Default for PlaneTree {
    fn default() -> Self {
        Self::single()
    }
}

impl PlaneTree {
    pub const NO_PARENT: usize = usize::MAX;

    pub fn single() -> Self {
        PlaneTree {
            children: vec![Vec::new()],
            parent: vec![Self::NO_PARENT],
        }
    }

    /// Appends a new last child of `p` and returns it.
    pub fn add_child(&mut self, p: usize) -> usize {
        let id = self.children.len();
        self.children.push(Vec::new());
        self.parent.push(p);
        self.children[p].push(id);
        id
    }

    /// Builds the tree whose depth-first preorder outdegrees are `degrees`.
    pub fn from_preorder_degrees(degrees: &[usize]) -> Result<Self, TreeError> {
        let total: usize = degrees.iter().sum();
        if degrees.is_empty() || total + 1 != degrees.len() {
            return Err(TreeError::BadDegreeSequence);
        }
        let mut tree = PlaneTree {
            children: Vec::with_capacity(degrees.len()),
            parent: Vec::with_capacity(degrees.len()),
        };
        tree.children.push(Vec::with_capacity(degrees[0]));
        tree.parent.push(Self::NO_PARENT);
        // Stack of (node, children still to attach).
        let mut stack: Vec<(usize, usize)> = vec![(0, degrees[0])];
        for &d in &degrees[1..] {
            loop {
                match stack.last() {
                    Some(&(_, 0)) => {
                        stack.pop();
                    }
                    Some(_) => break,
                    None => return Err(TreeError::BadDegreeSequence),
                }
            }
            let top = stack.last_mut().expect("checked above");
            top.1 -= 1;
            let p = top.0;
            let id = tree.children.len();
            tree.children.push(Vec::with_capacity(d));
            tree.parent.push(p);
            tree.children[p].push(id);
            stack.push((id, d));
        }
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn child_lists(&self) -> &[Vec<usize>] {
        &self.children
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        let p = self.parent[v];
        (p != Self::NO_PARENT).then_some(p)
    }

    pub fn outdegree(&self, v: usize) -> usize {
        self.children[v].len()
    }

    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        out
    }

    pub fn preorder_degrees(&self) -> Vec<usize> {
        self.preorder().into_iter().map(|v| self.outdegree(v)).collect()
    }

    /// Depth of every node (root at 0).
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.len()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &c in &self.children[v] {
                depth[c] = depth[v] + 1;
                queue.push_back(c);
            }
        }
        depth
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// The subtree of nodes at depth at most `h`, renumbered in preorder.
    pub fn truncate(&self, h: usize) -> PlaneTree {
        let mut out = PlaneTree::single();
        let mut stack = vec![(0usize, 0usize, 0usize)];
        while let Some((v, image, depth)) = stack.pop() {
            if depth == h {
                continue;
            }
            let mut pushed = Vec::with_capacity(self.children[v].len());
            for &c in &self.children[v] {
                pushed.push((c, out.add_child(image), depth + 1));
            }
            stack.extend(pushed.into_iter().rev());
        }
        out
    }

    /// Code up to rooted isomorphism with unordered children.
    pub fn canonical_code(&self) -> Vec<u8> {
        canonical_code(&self.children, 0)
    }

    /// Code up to isomorphism of plane trees (order kept).
    pub fn plane_code(&self) -> Vec<u8> {
        canonical_code_by(0, |v| self.children[v].as_slice(), |_| b'.', |_| true)
    }
}

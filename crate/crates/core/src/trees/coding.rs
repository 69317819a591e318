use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::canon::canonical_code_by;
use super::TreeError;
use crate::model::OmegaSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    White,
    Black,
}

/// A (k,Ω)-front coding tree stored as an arena; node 0 is the white root.
///
/// A black node has exactly `k` white children, kept in positional order:
/// white child `i` carries the parent front with entry `i` replaced by the
/// black label. Black children of a white node are unordered; once labels
/// are assigned they are kept sorted by label. Label 0 marks an unlabelled
/// black node (shapes produced by [`super::psi`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingTree {
    k: usize,
    root_front: Vec<usize>,
    color: Vec<Color>,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    label: Vec<usize>,
    blacks: usize,
}

impl CodingTree {
    pub const NO_PARENT: usize = usize::MAX;

    /// A bare white root with front `1..=k`.
    pub fn new(k: usize) -> Self {
        Self::with_root_front((1..=k).collect())
    }

    pub fn with_root_front(root_front: Vec<usize>) -> Self {
        assert!(!root_front.is_empty(), "k must be positive");
        CodingTree {
            k: root_front.len(),
            root_front,
            color: vec![Color::White],
            parent: vec![Self::NO_PARENT],
            children: vec![Vec::new()],
            label: vec![0],
            blacks: 0,
        }
    }

    pub fn with_capacity(k: usize, blacks: usize) -> Self {
        let nodes = 1 + blacks * (k + 1);
        let mut t = Self::new(k);
        t.color.reserve(nodes);
        t.parent.reserve(nodes);
        t.children.reserve(nodes);
        t.label.reserve(nodes);
        t
    }

    fn push_node(&mut self, color: Color, parent: usize, label: usize) -> usize {
        let id = self.color.len();
        self.color.push(color);
        self.parent.push(parent);
        self.children.push(Vec::new());
        self.label.push(label);
        self.children[parent].push(id);
        id
    }

    /// Attaches a black node with `label` below `white`, together with its
    /// `k` white children. Returns the black node.
    pub fn add_black(&mut self, white: usize, label: usize) -> usize {
        debug_assert_eq!(self.color[white], Color::White);
        let b = self.push_node(Color::Black, white, label);
        self.children[b].reserve_exact(self.k);
        for _ in 0..self.k {
            self.push_node(Color::White, b, 0);
        }
        self.blacks += 1;
        b
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn root_front(&self) -> &[usize] {
        &self.root_front
    }

    pub fn node_count(&self) -> usize {
        self.color.len()
    }

    /// Number of black nodes (hedra).
    pub fn size(&self) -> usize {
        self.blacks
    }

    pub fn color(&self, v: usize) -> Color {
        self.color[v]
    }

    pub fn is_black(&self, v: usize) -> bool {
        self.color[v] == Color::Black
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        let p = self.parent[v];
        (p != Self::NO_PARENT).then_some(p)
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn child_lists(&self) -> &[Vec<usize>] {
        &self.children
    }

    pub fn label(&self, v: usize) -> usize {
        self.label[v]
    }

    /// Index of a non-root white node among its black parent's children.
    pub fn position(&self, white: usize) -> usize {
        let p = self.parent[white];
        self.children[p]
            .iter()
            .position(|&c| c == white)
            .expect("child is listed under its parent")
    }

    pub fn black_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&v| self.is_black(v))
    }

    /// Root has exactly one black child.
    pub fn is_reduced(&self) -> bool {
        self.children[0].len() == 1
    }

    pub fn is_labelled(&self) -> bool {
        self.blacks == 0 || self.black_nodes().all(|b| self.label[b] != 0)
    }

    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.node_count());
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        out
    }

    /// Front tuples of all white nodes, flattened with stride `k` (black
    /// rows are left zero). Follows the substitution rule from the root.
    pub fn front_tuples(&self) -> Vec<usize> {
        let k = self.k;
        let mut fronts = vec![0usize; self.node_count() * k];
        fronts[..k].copy_from_slice(&self.root_front);
        for v in self.preorder() {
            if !self.is_black(v) {
                continue;
            }
            let w = self.parent[v];
            let label = self.label[v];
            for (i, &c) in self.children[v].iter().enumerate() {
                let (src, dst) = (w * k, c * k);
                fronts.copy_within(src..src + k, dst);
                fronts[dst + i] = label;
            }
        }
        fronts
    }

    /// Front of a single white node.
    pub fn front_of(&self, white: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut v = white;
        while v != 0 {
            let b = self.parent[v];
            path.push((self.position(v), self.label[b]));
            v = self.parent[b];
        }
        let mut front = self.root_front.clone();
        for (i, label) in path.into_iter().rev() {
            front[i] = label;
        }
        front
    }

    /// Assigns black labels in preorder and re-sorts white children.
    pub fn assign_labels(&mut self, labels: &[usize]) {
        let blacks: Vec<usize> = self.preorder().into_iter().filter(|&v| self.is_black(v)).collect();
        assert_eq!(blacks.len(), labels.len(), "one label per black node");
        for (&b, &l) in blacks.iter().zip(labels) {
            self.label[b] = l;
        }
        self.sort_children();
    }

    /// Labels black nodes by a uniform permutation of `k+1..=k+n`, matching
    /// root front `1..=k`.
    pub fn relabel_uniform<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let start = self.root_front.iter().copied().max().unwrap_or(0) + 1;
        let mut labels: Vec<usize> = (start..start + self.blacks).collect();
        labels.shuffle(rng);
        self.assign_labels(&labels);
    }

    /// Sorts the black children of every white node by label.
    pub fn sort_children(&mut self) {
        let CodingTree {
            color, children, label, ..
        } = self;
        for (v, kids) in children.iter_mut().enumerate() {
            if color[v] == Color::White && kids.len() > 1 {
                kids.sort_unstable_by_key(|&c| label[c]);
            }
        }
    }

    /// Copy with nodes renumbered in preorder.
    pub fn normalized(&self) -> CodingTree {
        let order = self.preorder();
        let mut index = vec![0usize; self.node_count()];
        for (i, &v) in order.iter().enumerate() {
            index[v] = i;
        }
        let map = |v: usize| {
            if v == Self::NO_PARENT {
                v
            } else {
                index[v]
            }
        };
        CodingTree {
            k: self.k,
            root_front: self.root_front.clone(),
            color: order.iter().map(|&v| self.color[v]).collect(),
            parent: order.iter().map(|&v| map(self.parent[v])).collect(),
            children: order
                .iter()
                .map(|&v| self.children[v].iter().map(|&c| index[c]).collect())
                .collect(),
            label: order.iter().map(|&v| self.label[v]).collect(),
            blacks: self.blacks,
        }
    }

    /// Code of the unlabelled shape: black children of white nodes are
    /// unordered, white children of black nodes stay positional.
    pub fn shape_code(&self) -> Vec<u8> {
        self.shape_code_from(0)
    }

    pub fn shape_code_from(&self, root: usize) -> Vec<u8> {
        canonical_code_by(
            root,
            |v| self.children[v].as_slice(),
            |v| if self.is_black(v) { b'b' } else { b'w' },
            |v| self.is_black(v),
        )
    }

    /// Shape code with the white children of every black node permuted by
    /// `perm`; the minimum over all `perm` forgets the order of the root front.
    pub fn shape_code_permuted(&self, perm: &[usize]) -> Vec<u8> {
        let permuted: Vec<Vec<usize>> = (0..self.node_count())
            .map(|v| {
                if self.is_black(v) {
                    perm.iter().map(|&i| self.children[v][i]).collect()
                } else {
                    self.children[v].clone()
                }
            })
            .collect();
        canonical_code_by(
            0,
            |v| permuted[v].as_slice(),
            |v| if self.is_black(v) { b'b' } else { b'w' },
            |v| self.is_black(v),
        )
    }

    /// Exact fingerprint of a labelled tree: preorder of (color, label) with
    /// subtree sizes. Equal keys mean equal labelled trees.
    pub fn labelled_key(&self) -> String {
        let mut out = String::new();
        let mut stack: Vec<(usize, bool)> = vec![(0, false)];
        while let Some((v, closing)) = stack.pop() {
            if closing {
                out.push(')');
                continue;
            }
            if self.is_black(v) {
                out.push_str(&format!("({}", self.label[v]));
            } else {
                out.push('(');
            }
            stack.push((v, true));
            for &c in self.children[v].iter().rev() {
                stack.push((c, false));
            }
        }
        out
    }

    /// Structural checks independent of Ω.
    pub fn validate_structure(&self) -> Result<(), TreeError> {
        let bad = |m: String| Err(TreeError::InvalidCodingTree(m));
        if self.color[0] != Color::White || self.parent[0] != Self::NO_PARENT {
            return bad("root must be a white node without parent".into());
        }
        let mut front = self.root_front.clone();
        front.sort_unstable();
        front.dedup();
        if front.len() != self.k || front.contains(&0) {
            return bad("root front must hold k distinct positive labels".into());
        }
        let mut blacks = 0;
        for v in 0..self.node_count() {
            for &c in &self.children[v] {
                if self.color[c] == self.color[v] {
                    return bad(format!("edge {v}-{c} joins nodes of equal color"));
                }
                if self.parent[c] != v {
                    return bad(format!("node {c} has inconsistent parent"));
                }
            }
            if self.is_black(v) {
                blacks += 1;
                if self.children[v].len() != self.k {
                    return bad(format!("black node {v} has {} children", self.children[v].len()));
                }
            }
        }
        if blacks != self.blacks || self.preorder().len() != self.node_count() {
            return bad("arena is not a single tree".into());
        }
        if self.blacks > 0 && self.is_labelled() {
            let n = self.blacks;
            let mut seen = vec![false; n + self.k + 1];
            for &f in &self.root_front {
                if f > n + self.k {
                    return bad(format!("root label {f} outside 1..={}", n + self.k));
                }
                seen[f] = true;
            }
            for b in self.black_nodes() {
                let l = self.label[b];
                if l > n + self.k || seen[l] {
                    return bad(format!("black label {l} repeated or out of range"));
                }
                seen[l] = true;
            }
        }
        Ok(())
    }

    /// Full check: structure plus outdegrees in Ω (root) and Ω_out (other whites).
    pub fn validate(&self, omega: &OmegaSet) -> Result<(), TreeError> {
        self.validate_structure()?;
        let out = omega.out();
        for v in 0..self.node_count() {
            if self.is_black(v) {
                continue;
            }
            let d = self.children[v].len();
            let ok = if v == 0 { omega.contains(d) } else { out.contains(d) };
            if !ok {
                return Err(TreeError::InvalidCodingTree(format!(
                    "white node {v} has outdegree {d} outside the allowed set"
                )));
            }
        }
        Ok(())
    }
}

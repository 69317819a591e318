//! Text formats: k-tree edge lists and JSON coding trees.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CodingTree, KTreeGraph};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed header: {0}")]
    Header(String),
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("malformed shape string at byte {0}")]
    Shape(usize),
    #[error("label count {got} does not match {want} black nodes")]
    LabelCount { got: usize, want: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl KTreeGraph {
    /// `# ktree k=K n=N root=...` followed by one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let front = self.root_front();
        let root = if front.iter().copied().eq(1..=self.k()) {
            format!("1..{}", self.k())
        } else {
            front.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
        };
        let mut out = format!("# ktree k={} n={} root={}\n", self.k(), self.hedra(), root);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<KTreeGraph, IoError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| IoError::Header("empty input".into()))?;
        let rest = header
            .trim()
            .strip_prefix("# ktree")
            .ok_or_else(|| IoError::Header(header.to_string()))?;
        let (mut k, mut n, mut root) = (None, None, None);
        for field in rest.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| IoError::Header(field.to_string()))?;
            let bad = || IoError::Header(field.to_string());
            match key {
                "k" => k = Some(value.parse::<usize>().map_err(|_| bad())?),
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad())?),
                "root" => root = Some(parse_root(value).ok_or_else(bad)?),
                _ => return Err(bad()),
            }
        }
        let k = k.ok_or_else(|| IoError::Header("missing k".into()))?;
        let n = n.ok_or_else(|| IoError::Header("missing n".into()))?;
        let root = root.unwrap_or_else(|| (1..=k).collect());
        if root.len() != k {
            return Err(IoError::Header(format!(
                "root front has {} vertices, k={k}",
                root.len()
            )));
        }
        let vertex_count = n + k;
        let mut edges = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| IoError::Line {
                line: i + 1,
                msg: msg.to_string(),
            };
            let mut parts = line.split_whitespace().map(str::parse::<usize>);
            let (Some(Ok(u)), Some(Ok(v)), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err("expected two vertex ids"));
            };
            if u == v || u == 0 || v == 0 || u > vertex_count || v > vertex_count {
                return Err(err("vertex id out of range or loop"));
            }
            edges.push((u, v));
        }
        Ok(KTreeGraph::from_edges(k, vertex_count, &edges, root))
    }
}

fn parse_root(value: &str) -> Option<Vec<usize>> {
    if let Some((a, b)) = value.split_once("..") {
        let (a, b) = (a.parse::<usize>().ok()?, b.parse::<usize>().ok()?);
        return (a <= b).then(|| (a..=b).collect());
    }
    value.split(',').map(|p| p.parse().ok()).collect()
}

/// JSON form of a coding tree: the nested-parenthesis shape in preorder
/// (colors alternate from a white root) and the black labels in preorder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodingTreeJson {
    pub k: usize,
    pub root_front: Vec<usize>,
    pub shape: String,
    pub labels: Vec<usize>,
}

impl CodingTree {
    pub fn to_json_repr(&self) -> CodingTreeJson {
        let mut shape = String::with_capacity(2 * self.node_count());
        let mut labels = Vec::with_capacity(self.size());
        let mut stack: Vec<(usize, bool)> = vec![(0, false)];
        while let Some((v, closing)) = stack.pop() {
            if closing {
                shape.push(')');
                continue;
            }
            shape.push('(');
            if self.is_black(v) {
                labels.push(self.label(v));
            }
            stack.push((v, true));
            for &c in self.children(v).iter().rev() {
                stack.push((c, false));
            }
        }
        CodingTreeJson {
            k: self.k(),
            root_front: self.root_front().to_vec(),
            shape,
            labels,
        }
    }

    pub fn from_json_repr(repr: &CodingTreeJson) -> Result<CodingTree, IoError> {
        let bytes = repr.shape.as_bytes();
        if bytes.first() != Some(&b'(') {
            return Err(IoError::Shape(0));
        }
        let mut tree = CodingTree::with_root_front(repr.root_front.clone());
        let mut labels = repr.labels.iter();
        let mut used = 0;
        // Open white nodes, and for each black node the index of the next white child.
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        for (i, &byte) in bytes.iter().enumerate().skip(1) {
            match byte {
                b'(' => {
                    let &mut (v, ref mut next) = stack.last_mut().ok_or(IoError::Shape(i))?;
                    if tree.is_black(v) {
                        let w = *tree.children(v).get(*next).ok_or(IoError::Shape(i))?;
                        *next += 1;
                        stack.push((w, 0));
                    } else {
                        let label = labels.next().copied().unwrap_or(0);
                        used += 1;
                        let b = tree.add_black(v, label);
                        stack.push((b, 0));
                    }
                }
                b')' => {
                    let (v, next) = stack.pop().ok_or(IoError::Shape(i))?;
                    if tree.is_black(v) && next != tree.k() {
                        return Err(IoError::Shape(i));
                    }
                    if stack.is_empty() && i + 1 != bytes.len() {
                        return Err(IoError::Shape(i + 1));
                    }
                }
                _ => return Err(IoError::Shape(i)),
            }
        }
        if !stack.is_empty() {
            return Err(IoError::Shape(bytes.len()));
        }
        if used != repr.labels.len() {
            return Err(IoError::LabelCount {
                got: repr.labels.len(),
                want: used,
            });
        }
        Ok(tree)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_repr()).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<CodingTree, IoError> {
        let repr: CodingTreeJson = serde_json::from_str(text)?;
        CodingTree::from_json_repr(&repr)
    }
}

use std::collections::VecDeque;

use super::TreeError;

/// A front-rooted graph on vertices `1..=N` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KTreeGraph {
    k: usize,
    /// `adj[0]` is unused so that vertex ids equal labels.
    adj: Vec<Vec<usize>>,
    root_front: Vec<usize>,
}

impl KTreeGraph {
    /// Builds a graph from an undirected edge list; duplicates are merged.
    pub fn from_edges(k: usize, vertex_count: usize, edges: &[(usize, usize)], root_front: Vec<usize>) -> Self {
        let mut adj = vec![Vec::new(); vertex_count + 1];
        for &(u, v) in edges {
            assert!(u != v && u >= 1 && v >= 1 && u <= vertex_count && v <= vertex_count);
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        KTreeGraph { k, adj, root_front }
    }

    pub(crate) fn from_adjacency(k: usize, adj: Vec<Vec<usize>>, root_front: Vec<usize>) -> Self {
        KTreeGraph { k, adj, root_front }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len() - 1
    }

    /// Number of hedra `n = N − k`.
    pub fn hedra(&self) -> usize {
        self.vertex_count().saturating_sub(self.k)
    }

    pub fn root_front(&self) -> &[usize] {
        &self.root_front
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 1..self.adj.len() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(i, &u)| vs[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// Checks that the graph grows from its root front by repeatedly adding a
    /// vertex joined to a k-clique: edge count, then simplicial elimination of
    /// degree-k vertices outside the root front.
    pub fn check_ktree(&self) -> Result<(), TreeError> {
        let k = self.k;
        let n_vertices = self.vertex_count();
        let mut front = self.root_front.clone();
        front.sort_unstable();
        front.dedup();
        if front.len() != k || front.iter().any(|&f| f == 0 || f > n_vertices) {
            return Err(TreeError::NotAKTree("root front must be k distinct vertices".into()));
        }
        if !self.is_clique(&front) {
            return Err(TreeError::DisconnectedRoot);
        }
        let expected = k * (k - 1) / 2 + self.hedra() * k;
        if self.edge_count() != expected {
            return Err(TreeError::NotAKTree(format!(
                "{} edges, expected {expected}",
                self.edge_count()
            )));
        }
        let mut in_front = vec![false; n_vertices + 1];
        for &f in &front {
            in_front[f] = true;
        }
        let mut removed = vec![false; n_vertices + 1];
        let mut degree: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (1..=n_vertices).filter(|&v| !in_front[v] && degree[v] == k).collect();
        let mut eliminated = 0;
        let mut live = Vec::with_capacity(k);
        while let Some(v) = queue.pop_front() {
            if removed[v] || degree[v] != k {
                continue;
            }
            live.clear();
            live.extend(self.adj[v].iter().copied().filter(|&u| !removed[u]));
            if !self.is_clique(&live) {
                continue;
            }
            removed[v] = true;
            eliminated += 1;
            for &u in &live {
                degree[u] -= 1;
                if degree[u] == k && !in_front[u] {
                    queue.push_back(u);
                }
            }
        }
        if eliminated + k != n_vertices {
            return Err(TreeError::NotAKTree(format!(
                "elimination stalled with {} vertices left",
                n_vertices - eliminated
            )));
        }
        Ok(())
    }

    /// Number of k-cliques (fronts).
    pub fn count_k_cliques(&self) -> usize {
        let mut count = 0;
        let mut clique = Vec::with_capacity(self.k);
        for v in 1..self.adj.len() {
            clique.clear();
            clique.push(v);
            count += self.extend_cliques(&mut clique);
        }
        count
    }

    fn extend_cliques(&self, clique: &mut Vec<usize>) -> usize {
        if clique.len() == self.k {
            return 1;
        }
        let last = *clique.last().expect("nonempty");
        let candidates: Vec<usize> = self.adj[last]
            .iter()
            .copied()
            .filter(|&u| u > last && clique.iter().all(|&c| self.has_edge(c, u)))
            .collect();
        let mut total = 0;
        for u in candidates {
            clique.push(u);
            total += self.extend_cliques(clique);
            clique.pop();
        }
        total
    }

    /// Multi-source BFS distances from `sources` (`usize::MAX` = unreachable).
    pub fn bfs_from(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.adj.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &u in &self.adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Induced subgraph on `keep`, relabelled so the root front becomes
    /// `1..=k` in order and the other vertices follow in increasing order.
    pub fn induced(&self, keep: &[bool]) -> KTreeGraph {
        let mut map = vec![0usize; self.adj.len()];
        let mut next = 1;
        for &f in &self.root_front {
            map[f] = next;
            next += 1;
        }
        for v in 1..self.adj.len() {
            if keep[v] && map[v] == 0 {
                map[v] = next;
                next += 1;
            }
        }
        let mut adj = vec![Vec::new(); next];
        for v in 1..self.adj.len() {
            if map[v] == 0 {
                continue;
            }
            adj[map[v]] = self.adj[v].iter().filter(|&&u| map[u] != 0).map(|&u| map[u]).collect();
            adj[map[v]].sort_unstable();
        }
        KTreeGraph {
            k: self.k,
            adj,
            root_front: (1..=self.k).collect(),
        }
    }
}

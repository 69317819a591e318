//! Exact Gromov-Hausdorff distance between tiny finite metric spaces.
//!
//! Every correspondence contains `graph(f) ∪ graph(g)ᵀ` for some maps
//! `f: X → Y` and `g: Y → X`, and distortion only grows with the relation,
//! so it suffices to search over such pairs. The search runs over candidate
//! distortion values and decides each one by backtracking.

use super::MetricsError;

pub const GH_POINT_CAP: usize = 7;
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    d: Vec<Vec<f64>>,
    base: Option<usize>,
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal, non-negativity and the triangle
    /// inequality.
    pub fn new(d: Vec<Vec<f64>>) -> Result<Self, MetricsError> {
        let n = d.len();
        let bad = |msg: String| Err(MetricsError::NotMetric(msg));
        for (i, row) in d.iter().enumerate() {
            if row.len() != n {
                return bad(format!("row {i} has {} entries, expected {n}", row.len()));
            }
            if row[i] != 0.0 {
                return bad(format!("d({i},{i}) = {}", row[i]));
            }
            for j in 0..n {
                if row[j].is_nan() || row[j] < 0.0 || (row[j] - d[j][i]).abs() > EPS {
                    return bad(format!("d({i},{j}) is negative or asymmetric"));
                }
                if i != j && row[j] == 0.0 {
                    return bad(format!("distinct points {i} and {j} at distance 0"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if d[i][l] > d[i][j] + d[j][l] + EPS {
                        return bad(format!("triangle inequality fails at ({i},{j},{l})"));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { d, base: None })
    }

    pub fn point() -> Self {
        FiniteMetricSpace {
            d: vec![vec![0.0]],
            base: None,
        }
    }

    /// Points `0..n` on a line with consecutive gaps `edge`.
    pub fn path(n: usize, edge: f64) -> Self {
        let d = (0..n)
            .map(|i| (0..n).map(|j| (i as f64 - j as f64).abs() * edge).collect())
            .collect();
        FiniteMetricSpace { d, base: None }
    }

    pub fn with_base(mut self, base: usize) -> Self {
        assert!(base < self.len(), "base point out of range");
        self.base = Some(base);
        self
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn base(&self) -> Option<usize> {
        self.base
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// `½ min dis(R)` over correspondences; pointed when both spaces carry a base
/// point, in which case `R` must relate the two base points.
pub fn gh_bruteforce(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64, MetricsError> {
    for s in [x, y] {
        if s.len() > GH_POINT_CAP || s.is_empty() {
            return Err(MetricsError::TooLarge {
                points: s.len(),
                cap: GH_POINT_CAP,
            });
        }
    }
    let mut candidates: Vec<f64> = Vec::new();
    for a in x.d.iter().flatten() {
        for b in y.d.iter().flatten() {
            candidates.push((a - b).abs());
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|a, b| (*a - *b).abs() <= EPS);
    // The largest candidate is always feasible.
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if Search::new(x, y, candidates[mid]).run() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo] / 2.0)
}

struct Search<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    t: f64,
    f: Vec<usize>,
    g: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(x: &'a FiniteMetricSpace, y: &'a FiniteMetricSpace, t: f64) -> Self {
        Search {
            x,
            y,
            t: t + EPS,
            f: Vec::with_capacity(x.len()),
            g: Vec::with_capacity(y.len()),
        }
    }

    fn run(&mut self) -> bool {
        self.assign_f()
    }

    fn pinned(&self, space_is_x: bool, point: usize) -> Option<usize> {
        let (from, to) = if space_is_x { (self.x, self.y) } else { (self.y, self.x) };
        match (from.base, to.base) {
            (Some(a), Some(b)) if a == point => Some(b),
            _ => None,
        }
    }

    fn assign_f(&mut self) -> bool {
        let i = self.f.len();
        if i == self.x.len() {
            return self.assign_g();
        }
        let choices: Vec<usize> = match self.pinned(true, i) {
            Some(b) => vec![b],
            None => (0..self.y.len()).collect(),
        };
        for v in choices {
            let ok = (0..i).all(|j| (self.x.d[i][j] - self.y.d[v][self.f[j]]).abs() <= self.t);
            if ok {
                self.f.push(v);
                if self.assign_f() {
                    return true;
                }
                self.f.pop();
            }
        }
        false
    }

    fn assign_g(&mut self) -> bool {
        let i = self.g.len();
        if i == self.y.len() {
            return true;
        }
        let choices: Vec<usize> = match self.pinned(false, i) {
            Some(a) => vec![a],
            None => (0..self.x.len()).collect(),
        };
        for u in choices {
            let pairs = (0..i).all(|j| (self.x.d[u][self.g[j]] - self.y.d[i][j]).abs() <= self.t);
            let cross = (0..self.x.len()).all(|a| (self.x.d[a][u] - self.y.d[self.f[a]][i]).abs() <= self.t);
            if pairs && cross {
                self.g.push(u);
                if self.assign_g() {
                    return true;
                }
                self.g.pop();
            }
        }
        false
    }
}

/// Direct minimum over all map pairs `(f, g)`; exponential, for testing.
pub fn gh_naive(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let (nx, ny) = (x.len(), y.len());
    let fs = all_maps(nx, ny);
    let gs = all_maps(ny, nx);
    let pinned = |m: &[usize], from: &FiniteMetricSpace, to: &FiniteMetricSpace| match (from.base, to.base) {
        (Some(a), Some(b)) => m[a] == b,
        _ => true,
    };
    let mut best = f64::INFINITY;
    for f in fs.iter().filter(|f| pinned(f, x, y)) {
        for g in gs.iter().filter(|g| pinned(g, y, x)) {
            let mut rel: Vec<(usize, usize)> = (0..nx).map(|a| (a, f[a])).collect();
            rel.extend((0..ny).map(|b| (g[b], b)));
            let mut dis: f64 = 0.0;
            for &(a, b) in &rel {
                for &(c, d) in &rel {
                    dis = dis.max((x.d[a][c] - y.d[b][d]).abs());
                }
            }
            best = best.min(dis);
        }
    }
    best / 2.0
}

fn all_maps(from: usize, to: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..from {
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..to).map(move |v| {
                    let mut m = m.clone();
                    m.push(v);
                    m
                })
            })
            .collect();
    }
    out
}

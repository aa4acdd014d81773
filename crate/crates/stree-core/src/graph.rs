//! Graph models: convex bipartite graphs, general graphs, interval families,
//! and caterpillar trees.
//!
//! A convex bipartite graph has parts X and Y where X carries a fixed linear
//! order `x1 < x2 < ... < xm` and every y-vertex's neighborhood is a
//! contiguous run of that order. We store each neighborhood as a closed
//! 1-based interval `[l, r]`, so `xp` is adjacent to `yi` iff `l_i <= p <= r_i`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::GraphError;

/// A vertex of a convex bipartite graph. Indices are 1-based on both sides.
///
/// The derived order (all X before all Y, each side by index) is what makes
/// `BTreeSet<Vertex>` iteration, and therefore every serialized set in this
/// crate, deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    X(usize),
    Y(usize),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::X(p) => write!(f, "x{p}"),
            Vertex::Y(i) => write!(f, "y{i}"),
        }
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Closed neighborhood interval of a y-vertex, 1-based positions on the X order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub l: usize,
    pub r: usize,
}

impl Interval {
    pub fn new(l: usize, r: usize) -> Self {
        Interval { l, r }
    }

    pub fn contains(&self, p: usize) -> bool {
        self.l <= p && p <= self.r
    }

    pub fn len(&self) -> usize {
        self.r - self.l + 1
    }

    pub fn is_empty(&self) -> bool {
        false // l <= r is enforced at graph construction
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.l, self.r)
    }
}

/// Result of a farthest-reach query at position `x`: the neighbor chosen to
/// continue a rightward walk, plus the full set of tied neighbors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarReach {
    /// Index of the chosen y-vertex: among neighbors whose right end is
    /// maximal, the one with the largest index.
    pub w: usize,
    /// All neighbor indices whose right end attains the maximum.
    pub t_set: BTreeSet<usize>,
}

/// Validation outcome for raw convex-bipartite data. `violations` lists
/// structural problems; `connected` reports whether the graph is connected.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub connected: bool,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks raw interval data against `m` without constructing a graph.
/// Connectivity is only meaningful when the bounds all hold.
pub fn validate_convex(m: usize, intervals: &[Interval]) -> ValidationReport {
    let mut violations = Vec::new();
    if m == 0 {
        violations.push("m must be at least 1".to_string());
    }
    for (idx, iv) in intervals.iter().enumerate() {
        let y = idx + 1;
        if iv.l < 1 || iv.r > m || iv.l > iv.r {
            violations.push(format!("interval y{y} = {iv} violates 1 <= l <= r <= {m}"));
        }
    }
    let connected = if violations.is_empty() {
        ConvexBipartiteGraph::new(m, intervals.to_vec())
            .map(|g| g.is_connected())
            .unwrap_or(false)
    } else {
        false
    };
    ValidationReport {
        violations,
        connected,
    }
}

/// Convex bipartite graph with `m` ordered x-vertices and one interval per
/// y-vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexBipartiteGraph {
    m: usize,
    intervals: Vec<Interval>,
}

impl ConvexBipartiteGraph {
    /// Builds a graph after checking `1 <= l <= r <= m` for every interval.
    /// Connectivity is not required here; solvers check it where they need it.
    pub fn new(m: usize, intervals: Vec<Interval>) -> Result<Self, GraphError> {
        if m == 0 {
            return Err(GraphError::IndexOutOfRange("m=0".to_string()));
        }
        for (idx, iv) in intervals.iter().enumerate() {
            if iv.l < 1 || iv.r > m || iv.l > iv.r {
                return Err(GraphError::IntervalOutOfBounds {
                    y: idx + 1,
                    l: iv.l,
                    r: iv.r,
                    m,
                });
            }
        }
        Ok(ConvexBipartiteGraph { m, intervals })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Interval of `yi`. Panics if `y` is not in `1..=n`; use
    /// [`interval_bounds`](Self::interval_bounds) for untrusted indices.
    pub fn interval(&self, y: usize) -> Interval {
        self.intervals[y - 1]
    }

    pub fn interval_bounds(&self, y: usize) -> Result<(usize, usize), GraphError> {
        if y == 0 || y > self.intervals.len() {
            return Err(GraphError::IndexOutOfRange(format!("y{y}")));
        }
        let iv = self.intervals[y - 1];
        Ok((iv.l, iv.r))
    }

    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        y >= 1 && y <= self.intervals.len() && self.intervals[y - 1].contains(x)
    }

    /// Indices of y-vertices adjacent to `xp`.
    pub fn y_neighbors(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        self.intervals
            .iter()
            .enumerate()
            .filter(move |(_, iv)| iv.contains(p))
            .map(|(idx, _)| idx + 1)
    }

    /// Among neighbors of `xp`, finds those whose right end is maximal and
    /// picks the one with the largest index as the walk continuation.
    pub fn far_reach(&self, p: usize) -> Result<FarReach, GraphError> {
        if p == 0 || p > self.m {
            return Err(GraphError::IndexOutOfRange(format!("x{p}")));
        }
        let mut best_r = 0usize;
        let mut t_set = BTreeSet::new();
        for y in self.y_neighbors(p) {
            let r = self.intervals[y - 1].r;
            match r.cmp(&best_r) {
                std::cmp::Ordering::Greater => {
                    best_r = r;
                    t_set.clear();
                    t_set.insert(y);
                }
                std::cmp::Ordering::Equal => {
                    t_set.insert(y);
                }
                std::cmp::Ordering::Less => {}
            }
        }
        let w = *t_set.iter().next_back().ok_or(GraphError::EmptyNeighborhood(p))?;
        Ok(FarReach { w, t_set })
    }

    /// Connectivity in O(m + n): with a single x the graph is a star, and with
    /// m >= 2 it is connected iff every cut between consecutive positions
    /// p, p+1 is crossed by some interval (l <= p and r >= p+1).
    pub fn is_connected(&self) -> bool {
        if self.m == 1 {
            return true;
        }
        if self.intervals.is_empty() {
            return false;
        }
        // diff[p] accumulates how many intervals cross the cut p|p+1
        let mut diff = vec![0i64; self.m + 1];
        for iv in &self.intervals {
            if iv.r > iv.l {
                diff[iv.l] += 1;
                diff[iv.r] -= 1;
            }
        }
        let mut crossing = 0i64;
        for p in 1..self.m {
            crossing += diff[p];
            if crossing == 0 {
                return false;
            }
        }
        true
    }

    pub fn validate(&self) -> ValidationReport {
        validate_convex(self.m, &self.intervals)
    }
}

/// Simple undirected graph on vertices `1..=n`, stored as a normalized edge
/// list plus adjacency sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<BTreeSet<usize>>,
}

impl GeneralGraph {
    /// Vertices are 1-based. Edges are normalized to `(min, max)`; self-loops
    /// and duplicates are rejected.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut adj = vec![BTreeSet::new(); n + 1];
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == 0 || u > n {
                return Err(GraphError::IndexOutOfRange(format!("v{u}")));
            }
            if v == 0 || v > n {
                return Err(GraphError::IndexOutOfRange(format!("v{v}")));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let (a, b) = (u.min(v), u.max(v));
            if !adj[a].insert(b) {
                return Err(GraphError::DuplicateEdge(a, b));
            }
            adj[b].insert(a);
            normalized.push((a, b));
        }
        normalized.sort_unstable();
        Ok(GeneralGraph {
            n,
            edges: normalized,
            adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        u >= 1 && u <= self.n && self.adj[u].contains(&v)
    }

    pub fn neighbors_of(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let all: BTreeSet<usize> = (1..=self.n).collect();
        self.induced_connected(&all)
    }
}

/// Family of closed intervals on the integer line, modelling an interval
/// graph: vertices are intervals, edges are nonempty intersections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalGraphModel {
    intervals: Vec<(i64, i64)>,
}

impl IntervalGraphModel {
    pub fn new(intervals: Vec<(i64, i64)>) -> Result<Self, GraphError> {
        if intervals.is_empty() {
            return Err(GraphError::EmptyFamily);
        }
        for (idx, (a, b)) in intervals.iter().enumerate() {
            if a > b {
                return Err(GraphError::IndexOutOfRange(format!(
                    "interval v{} = [{a},{b}] has left > right",
                    idx + 1
                )));
            }
        }
        Ok(IntervalGraphModel { intervals })
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.intervals
    }

    pub fn interval(&self, i: usize) -> (i64, i64) {
        self.intervals[i - 1]
    }

    pub fn overlaps(&self, i: usize, j: usize) -> bool {
        let (la, ra) = self.intervals[i - 1];
        let (lb, rb) = self.intervals[j - 1];
        la.max(lb) <= ra.min(rb)
    }

    /// The intersection graph on vertices `1..=len`.
    pub fn intersection_graph(&self) -> GeneralGraph {
        let n = self.intervals.len();
        let mut edges = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                if self.overlaps(i, j) {
                    edges.push((i, j));
                }
            }
        }
        GeneralGraph::new(n, edges).expect("intersection edges are loop-free and distinct")
    }
}

/// Adjacency abstraction shared by the brute-force oracle, connectivity
/// checks, and witness-tree extraction. Vertex types only need a total order
/// so traversals and outputs stay deterministic.
pub trait Adjacency {
    type V: Copy + Ord + fmt::Debug + fmt::Display;

    fn vertices(&self) -> Vec<Self::V>;
    fn neighbors(&self, v: Self::V) -> Vec<Self::V>;

    /// Whether `set` induces a connected subgraph. The empty set is vacuously
    /// connected.
    fn induced_connected(&self, set: &BTreeSet<Self::V>) -> bool {
        let start = match set.iter().next() {
            Some(&v) => v,
            None => return true,
        };
        let mut seen = BTreeSet::new();
        seen.insert(start);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for u in self.neighbors(v) {
                if set.contains(&u) && seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        seen.len() == set.len()
    }
}

impl Adjacency for ConvexBipartiteGraph {
    type V = Vertex;

    fn vertices(&self) -> Vec<Vertex> {
        (1..=self.m)
            .map(Vertex::X)
            .chain((1..=self.intervals.len()).map(Vertex::Y))
            .collect()
    }

    fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        match v {
            Vertex::X(p) => self.y_neighbors(p).map(Vertex::Y).collect(),
            Vertex::Y(i) => {
                let iv = self.intervals[i - 1];
                (iv.l..=iv.r).map(Vertex::X).collect()
            }
        }
    }
}

impl Adjacency for GeneralGraph {
    type V = usize;

    fn vertices(&self) -> Vec<usize> {
        (1..=self.n).collect()
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        self.adj[v].iter().copied().collect()
    }
}

/// Spanning-tree edges of the subgraph induced by `set`, as (parent, child)
/// pairs from a BFS rooted at the smallest vertex. Deterministic given the
/// vertex order. Empty when `set` has fewer than two vertices; callers check
/// connectivity separately.
pub fn witness_tree<G: Adjacency>(g: &G, set: &BTreeSet<G::V>) -> Vec<(G::V, G::V)> {
    let start = match set.iter().next() {
        Some(&v) => v,
        None => return Vec::new(),
    };
    let mut seen = BTreeSet::new();
    seen.insert(start);
    let mut queue = std::collections::VecDeque::from([start]);
    let mut edges = Vec::new();
    while let Some(v) = queue.pop_front() {
        let mut next: Vec<G::V> = g
            .neighbors(v)
            .into_iter()
            .filter(|u| set.contains(u) && !seen.contains(u))
            .collect();
        next.sort_unstable();
        next.dedup();
        for u in next {
            seen.insert(u);
            edges.push((v, u));
            queue.push_back(u);
        }
    }
    edges
}

/// Caterpillar tree: a backbone path plus pendant leaves hanging off backbone
/// vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caterpillar<V: Ord> {
    pub backbone: Vec<V>,
    pub pendants: std::collections::BTreeMap<V, Vec<V>>,
}

impl<V: Copy + Ord + fmt::Debug> Caterpillar<V> {
    /// A bare path: every backbone vertex has zero pendants.
    pub fn path(backbone: Vec<V>) -> Self {
        Caterpillar {
            backbone,
            pendants: std::collections::BTreeMap::new(),
        }
    }

    pub fn vertex_set(&self) -> BTreeSet<V> {
        let mut s: BTreeSet<V> = self.backbone.iter().copied().collect();
        for ps in self.pendants.values() {
            s.extend(ps.iter().copied());
        }
        s
    }

    fn backbone_position(&self) -> std::collections::BTreeMap<V, usize> {
        self.backbone
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect()
    }

    /// Whether `set` induces a (connected) subtree of the caterpillar.
    pub fn induces_subtree(&self, set: &BTreeSet<V>) -> bool {
        if set.is_empty() {
            return true;
        }
        let pos = self.backbone_position();
        let owner: std::collections::BTreeMap<V, V> = self
            .pendants
            .iter()
            .flat_map(|(&b, ps)| ps.iter().map(move |&p| (p, b)))
            .collect();
        // a pendant's only edge goes to its owner; backbone vertices connect
        // to path neighbors and their own pendants
        let start = *set.iter().next().expect("nonempty");
        let mut seen = BTreeSet::new();
        seen.insert(start);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let mut adj: Vec<V> = Vec::new();
            if let Some(&i) = pos.get(&v) {
                if i > 0 {
                    adj.push(self.backbone[i - 1]);
                }
                if i + 1 < self.backbone.len() {
                    adj.push(self.backbone[i + 1]);
                }
                if let Some(ps) = self.pendants.get(&v) {
                    adj.extend(ps.iter().copied());
                }
            } else if let Some(&b) = owner.get(&v) {
                adj.push(b);
            }
            for u in adj {
                if set.contains(&u) && seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        seen.len() == set.len()
    }
}

/// Checks that `structure` is a k-caterpillar arrangement of `x_side` under
/// which every neighborhood in `y_neighborhoods` induces a subtree.
///
/// Structural errors (duplicate or foreign vertices, wrong pendant count,
/// not spanning `x_side`) are reported as `Err`; the subtree property itself
/// is the `Ok` payload.
pub fn validate_k_star_caterpillar_convex<V: Copy + Ord + fmt::Debug + fmt::Display>(
    x_side: &BTreeSet<V>,
    y_neighborhoods: &[BTreeSet<V>],
    structure: &Caterpillar<V>,
    k: usize,
) -> Result<bool, GraphError> {
    let mut seen = BTreeSet::new();
    for v in &structure.backbone {
        if !seen.insert(*v) {
            return Err(GraphError::BadStructure(format!(
                "backbone repeats vertex {v}"
            )));
        }
    }
    let backbone_set = seen.clone();
    for (b, ps) in &structure.pendants {
        if !backbone_set.contains(b) {
            return Err(GraphError::BadStructure(format!(
                "pendant owner {b} is not on the backbone"
            )));
        }
        for p in ps {
            if !seen.insert(*p) {
                return Err(GraphError::BadStructure(format!(
                    "vertex {p} appears twice in the structure"
                )));
            }
        }
    }
    for b in &structure.backbone {
        let count = structure.pendants.get(b).map_or(0, Vec::len);
        if count != k {
            return Err(GraphError::BadStructure(format!(
                "backbone vertex {b} has {count} pendants, expected {k}"
            )));
        }
    }
    if &seen != x_side {
        return Err(GraphError::BadStructure(
            "structure does not span the x side exactly".to_string(),
        ));
    }
    for nb in y_neighborhoods {
        if !nb.iter().all(|v| x_side.contains(v)) {
            return Err(GraphError::BadStructure(
                "neighborhood contains a vertex outside the x side".to_string(),
            ));
        }
    }
    Ok(y_neighborhoods
        .iter()
        .all(|nb| structure.induces_subtree(nb)))
}

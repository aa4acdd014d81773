//! Routing and reductions: the general solver entry point for any terminal
//! mix, plus transfers to and from neighboring problems (interval graphs,
//! domination, vertex cover).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::dp::{solve_subset_y, solve_subset_y_fewest_buys};
use crate::error::{GraphError, SolveError};
use crate::graph::{
    Adjacency, Caterpillar, ConvexBipartiteGraph, GeneralGraph, Interval, IntervalGraphModel,
    Vertex,
};
use crate::greedy::{solve_all_x, solve_all_y, solve_subset_x};
use crate::solution::{SteinerResult, TerminalCase, Trace};

/// Which solver a terminal mix routes to. `None` when both sides are empty.
pub fn terminal_case(
    graph: &ConvexBipartiteGraph,
    r_x: &BTreeSet<usize>,
    r_y: &BTreeSet<usize>,
) -> Option<TerminalCase> {
    match (r_x.is_empty(), r_y.is_empty()) {
        (true, true) => None,
        (false, true) => Some(if r_x.len() == graph.m() {
            TerminalCase::AllX
        } else {
            TerminalCase::SubsetX
        }),
        (true, false) => Some(if r_y.len() == graph.n() {
            TerminalCase::AllY
        } else {
            TerminalCase::SubsetY
        }),
        (false, false) => Some(TerminalCase::Mixed),
    }
}

fn check_ranges(
    graph: &ConvexBipartiteGraph,
    r_x: &BTreeSet<usize>,
    r_y: &BTreeSet<usize>,
) -> Result<(), SolveError> {
    for &p in r_x {
        if p == 0 || p > graph.m() {
            return Err(SolveError::BadTerminal(format!("x{p}")));
        }
    }
    for &y in r_y {
        if y == 0 || y > graph.n() {
            return Err(SolveError::BadTerminal(format!("y{y}")));
        }
    }
    Ok(())
}

/// Solves for an arbitrary terminal set given by its x positions and y
/// indices, dispatching to the specialized solver for the mix.
pub fn solve_general(
    graph: &ConvexBipartiteGraph,
    r_x: &BTreeSet<usize>,
    r_y: &BTreeSet<usize>,
) -> Result<SteinerResult, SolveError> {
    check_ranges(graph, r_x, r_y)?;
    match terminal_case(graph, r_x, r_y) {
        None => Err(SolveError::EmptyTerminals),
        Some(TerminalCase::AllX) => solve_all_x(graph),
        Some(TerminalCase::SubsetX) => solve_subset_x(graph, r_x),
        Some(TerminalCase::AllY) => solve_all_y(graph),
        Some(TerminalCase::SubsetY) => solve_subset_y(graph, r_y),
        Some(TerminalCase::Mixed) => lift_mixed_terminals(graph, r_x, r_y),
    }
}

/// Solves a terminal set that includes x positions by lifting the graph:
/// each terminal position p gains a pendant interval [p,p] whose new
/// y-vertex replaces p as a terminal. A pendant's only neighbor is `xp`, so
/// any lifted solution connecting two or more terminals must include `xp`;
/// removing those pinned connectors afterwards yields a minimum set for the
/// original terminals, since adding them back lifts any original solution.
pub fn lift_mixed_terminals(
    graph: &ConvexBipartiteGraph,
    r_x: &BTreeSet<usize>,
    r_y: &BTreeSet<usize>,
) -> Result<SteinerResult, SolveError> {
    if r_x.is_empty() {
        return Err(SolveError::WrongCase(
            "no x terminals to lift; use a y-side solver",
        ));
    }
    check_ranges(graph, r_x, r_y)?;
    let n = graph.n();
    let mut lifted_ivs = graph.intervals().to_vec();
    let mut r_star: BTreeSet<usize> = r_y.clone();
    for (k, &p) in r_x.iter().enumerate() {
        lifted_ivs.push(Interval::new(p, p));
        r_star.insert(n + k + 1);
    }
    let lifted = ConvexBipartiteGraph::new(graph.m(), lifted_ivs)?;
    let inner = if r_star.len() == lifted.n() {
        solve_all_y(&lifted)?
    } else {
        solve_subset_y(&lifted, &r_star)?
    };

    let mut set = inner.steiner_set;
    let mut forced = Vec::new();
    if r_star.len() >= 2 {
        for &p in r_x {
            if !set.remove(&Vertex::X(p)) {
                return Err(SolveError::Internal(format!(
                    "lifted solution is missing the pinned connector x{p}"
                )));
            }
            forced.push(p);
        }
    }
    let terminals: BTreeSet<Vertex> = r_x
        .iter()
        .map(|&p| Vertex::X(p))
        .chain(r_y.iter().map(|&y| Vertex::Y(y)))
        .collect();
    let trace = Trace::Lifted {
        forced,
        inner: Box::new(inner.trace),
    };
    SteinerResult::checked(graph, &terminals, set, trace)
}

/// Image of an interval family as a convex bipartite graph: x positions are
/// the sorted distinct endpoint values, and each interval becomes the
/// y-vertex spanning the positions of the values it contains.
#[derive(Debug, Clone)]
pub struct IntervalReduction {
    pub image: ConvexBipartiteGraph,
    /// Value of each x position, ascending; `positions[p-1]` is position p.
    pub positions: Vec<i64>,
}

pub fn interval_to_convex_bipartite(model: &IntervalGraphModel) -> IntervalReduction {
    let mut positions: Vec<i64> = model
        .intervals()
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .collect();
    positions.sort_unstable();
    positions.dedup();
    let rank = |v: i64| {
        positions
            .binary_search(&v)
            .expect("every endpoint is a recorded value")
            + 1
    };
    let intervals: Vec<Interval> = model
        .intervals()
        .iter()
        .map(|&(a, b)| Interval::new(rank(a), rank(b)))
        .collect();
    let image = ConvexBipartiteGraph::new(positions.len(), intervals)
        .expect("ranks lie within the position range");
    IntervalReduction { image, positions }
}

/// Outcome of solving Steiner connectivity on an interval graph through its
/// convex bipartite image.
#[derive(Debug, Clone)]
pub struct IntervalSteinerResult {
    pub reduction: IntervalReduction,
    pub image_result: SteinerResult,
    /// Chosen interval ids (1-based into the model).
    pub steiner_set: BTreeSet<usize>,
    pub size: usize,
}

/// Minimum Steiner set in the intersection graph of `model` for the terminal
/// interval ids `terminals`. Solves on the bipartite image and keeps only the
/// y side of the image solution: two intervals adjacent to a common image
/// position overlap, so dropping the positions preserves connectivity.
pub fn solve_interval_steiner(
    model: &IntervalGraphModel,
    terminals: &BTreeSet<usize>,
) -> Result<IntervalSteinerResult, SolveError> {
    if terminals.is_empty() {
        return Err(SolveError::EmptyTerminals);
    }
    for &i in terminals {
        if i == 0 || i > model.len() {
            return Err(SolveError::BadTerminal(format!("v{i}")));
        }
    }
    let reduction = interval_to_convex_bipartite(model);
    let image_result = if terminals.len() == model.len() {
        solve_all_y(&reduction.image)?
    } else {
        // The projection below keeps only the interval side, so the image
        // solve must spare buys: a vertex-minimal image plan can buy an
        // interval that a plan with one more connector avoids.
        solve_subset_y_fewest_buys(&reduction.image, terminals)?
    };
    let steiner_set: BTreeSet<usize> = image_result
        .steiner_set
        .iter()
        .filter_map(|v| match v {
            Vertex::Y(i) => Some(*i),
            Vertex::X(_) => None,
        })
        .collect();
    let union: BTreeSet<usize> = terminals.union(&steiner_set).copied().collect();
    if !model.intersection_graph().induced_connected(&union) {
        return Err(SolveError::Internal(
            "projected interval set fails to connect the terminals".to_string(),
        ));
    }
    let size = steiner_set.len();
    Ok(IntervalSteinerResult {
        reduction,
        image_result,
        steiner_set,
        size,
    })
}

/// Dominating set assembled from the two all-terminal sweeps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominationResult {
    pub dominating_set: BTreeSet<Vertex>,
    /// Contribution of the all-x sweep (interval choices covering every position).
    pub from_all_x: BTreeSet<Vertex>,
    /// Contribution of the all-y sweep (stab positions hitting every interval).
    pub from_all_y: BTreeSet<Vertex>,
    /// True when both sweeps come back empty and x1 is used directly.
    pub special_case: bool,
}

/// Builds a dominating set as the union of the two all-terminal solutions.
/// The intervals from the all-x sweep jointly cover every position, and the
/// stabs from the all-y sweep hit every interval, so the union dominates.
/// It is not guaranteed to be minimum.
pub fn dominating_set_via_stree(
    graph: &ConvexBipartiteGraph,
) -> Result<DominationResult, SolveError> {
    if graph.m() == 1 && graph.n() <= 1 {
        // both sweeps are trivially empty here, yet a vertex is still needed
        let dominating_set = BTreeSet::from([Vertex::X(1)]);
        verify_domination(graph, &dominating_set)?;
        return Ok(DominationResult {
            dominating_set,
            from_all_x: BTreeSet::new(),
            from_all_y: BTreeSet::new(),
            special_case: true,
        });
    }
    let from_all_x = solve_all_x(graph)?.steiner_set;
    let from_all_y = solve_all_y(graph)?.steiner_set;
    let dominating_set: BTreeSet<Vertex> = from_all_x.union(&from_all_y).copied().collect();
    verify_domination(graph, &dominating_set)?;
    Ok(DominationResult {
        dominating_set,
        from_all_x,
        from_all_y,
        special_case: false,
    })
}

fn verify_domination(
    graph: &ConvexBipartiteGraph,
    d: &BTreeSet<Vertex>,
) -> Result<(), SolveError> {
    for p in 1..=graph.m() {
        if !d.contains(&Vertex::X(p))
            && !graph.y_neighbors(p).any(|y| d.contains(&Vertex::Y(y)))
        {
            return Err(SolveError::Internal(format!("x{p} is not dominated")));
        }
    }
    for y in 1..=graph.n() {
        if d.contains(&Vertex::Y(y)) {
            continue;
        }
        let iv = graph.interval(y);
        if !(iv.l..=iv.r).any(|p| d.contains(&Vertex::X(p))) {
            return Err(SolveError::Internal(format!("y{y} is not dominated")));
        }
    }
    Ok(())
}

/// Vertex of the star-composition gadget built from a general graph: one
/// vertex per original vertex, and two y/z copies per original edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GadgetVertex {
    /// Stands for original vertex i; forms the non-star side.
    VertexX(usize),
    /// Pendant copy c (1 or 2) for edge e; adjacent to the edge's endpoints.
    EdgeY(usize, u8),
    /// Backbone copy c (1 or 2) for edge e; adjacent to every vertex copy.
    EdgeZ(usize, u8),
}

impl fmt::Display for GadgetVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetVertex::VertexX(i) => write!(f, "x{i}"),
            GadgetVertex::EdgeY(e, c) => write!(f, "y{e}_{c}"),
            GadgetVertex::EdgeZ(e, c) => write!(f, "z{e}_{c}"),
        }
    }
}

impl Serialize for GadgetVertex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The gadget graph: bipartite between the vertex copies on one side and the
/// edge copies (pendants and backbone) on the other. Each pendant sees only
/// its edge's endpoints; each backbone copy sees every vertex copy.
#[derive(Debug, Clone)]
pub struct StarGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl StarGraph {
    pub fn original_vertex_count(&self) -> usize {
        self.n
    }

    pub fn original_edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// The side carrying the caterpillar structure: all edge copies.
    pub fn star_side(&self) -> BTreeSet<GadgetVertex> {
        let mut s = BTreeSet::new();
        for e in 1..=self.edges.len() {
            for c in 1..=2u8 {
                s.insert(GadgetVertex::EdgeY(e, c));
                s.insert(GadgetVertex::EdgeZ(e, c));
            }
        }
        s
    }

    /// Neighborhood of each vertex copy, as subsets of the star side.
    pub fn vertex_side_neighborhoods(&self) -> Vec<BTreeSet<GadgetVertex>> {
        (1..=self.n)
            .map(|i| {
                self.neighbors(GadgetVertex::VertexX(i))
                    .into_iter()
                    .collect()
            })
            .collect()
    }
}

impl Adjacency for StarGraph {
    type V = GadgetVertex;

    fn vertices(&self) -> Vec<GadgetVertex> {
        let mut vs: Vec<GadgetVertex> = (1..=self.n).map(GadgetVertex::VertexX).collect();
        for e in 1..=self.edges.len() {
            for c in 1..=2u8 {
                vs.push(GadgetVertex::EdgeY(e, c));
            }
        }
        for e in 1..=self.edges.len() {
            for c in 1..=2u8 {
                vs.push(GadgetVertex::EdgeZ(e, c));
            }
        }
        vs
    }

    fn neighbors(&self, v: GadgetVertex) -> Vec<GadgetVertex> {
        match v {
            GadgetVertex::VertexX(i) => {
                let mut out = Vec::new();
                for (e, &(a, b)) in self.edges.iter().enumerate() {
                    if a == i || b == i {
                        out.push(GadgetVertex::EdgeY(e + 1, 1));
                        out.push(GadgetVertex::EdgeY(e + 1, 2));
                    }
                }
                for e in 1..=self.edges.len() {
                    out.push(GadgetVertex::EdgeZ(e, 1));
                    out.push(GadgetVertex::EdgeZ(e, 2));
                }
                out
            }
            GadgetVertex::EdgeY(e, _) => match self.edges.get(e - 1) {
                Some(&(a, b)) => vec![GadgetVertex::VertexX(a), GadgetVertex::VertexX(b)],
                None => Vec::new(),
            },
            GadgetVertex::EdgeZ(_, _) => (1..=self.n).map(GadgetVertex::VertexX).collect(),
        }
    }
}

/// A vertex cover question recast as a Steiner question on the gadget graph,
/// together with the caterpillar arrangement of its star side.
#[derive(Debug, Clone)]
pub struct VcReduction {
    pub graph: StarGraph,
    pub structure: Caterpillar<GadgetVertex>,
    pub terminals: BTreeSet<GadgetVertex>,
    /// Same budget as the cover question: a cover of size k yields a Steiner
    /// set of size k and vice versa.
    pub budget: usize,
}

/// Builds the gadget for "does `g` have a vertex cover of size <= k".
///
/// Every pendant terminal's neighborhood is exactly its edge's two endpoint
/// copies, so a Steiner set must pick one endpoint per edge (a cover), and
/// any cover connects through the backbone terminal, which sees every vertex
/// copy. Minimum cover size therefore equals minimum Steiner size.
pub fn vc_to_caterpillar_stree(g: &GeneralGraph, k: usize) -> Result<VcReduction, GraphError> {
    if g.edge_count() == 0 {
        return Err(GraphError::Edgeless);
    }
    let graph = StarGraph {
        n: g.vertex_count(),
        edges: g.edges().to_vec(),
    };
    let me = graph.edges.len();
    let backbone: Vec<GadgetVertex> = (1..=me)
        .flat_map(|e| [GadgetVertex::EdgeZ(e, 1), GadgetVertex::EdgeZ(e, 2)])
        .collect();
    let pendants = backbone
        .iter()
        .map(|&z| match z {
            GadgetVertex::EdgeZ(e, c) => (z, vec![GadgetVertex::EdgeY(e, c)]),
            _ => unreachable!("backbone holds only z copies"),
        })
        .collect();
    let structure = Caterpillar { backbone, pendants };
    let mut terminals: BTreeSet<GadgetVertex> = (1..=me)
        .flat_map(|e| [GadgetVertex::EdgeY(e, 1), GadgetVertex::EdgeY(e, 2)])
        .collect();
    terminals.insert(GadgetVertex::EdgeZ(1, 1));
    Ok(VcReduction {
        graph,
        structure,
        terminals,
        budget: k,
    })
}

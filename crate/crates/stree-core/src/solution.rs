//! Solver output vocabulary: the result type every Steiner solver returns,
//! plus the per-algorithm trace records that make runs replayable in tests
//! and in CLI reports.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::SolveError;
use crate::graph::{witness_tree, Adjacency, Vertex};

/// Shape of a terminal set relative to the bipartition. Drives solver routing
/// and is echoed in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalCase {
    AllX,
    SubsetX,
    AllY,
    SubsetY,
    Mixed,
}

impl TerminalCase {
    pub const ALL: [TerminalCase; 5] = [
        TerminalCase::AllX,
        TerminalCase::SubsetX,
        TerminalCase::AllY,
        TerminalCase::SubsetY,
        TerminalCase::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TerminalCase::AllX => "all_x",
            TerminalCase::SubsetX => "subset_x",
            TerminalCase::AllY => "all_y",
            TerminalCase::SubsetY => "subset_y",
            TerminalCase::Mixed => "mixed",
        }
    }
}

/// One step of the rightward walk used when every x is a terminal: query the
/// farthest-reaching neighbor at `at`, pick it, jump to its right end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalkStep {
    pub at: usize,
    pub chose: usize,
    pub reach: usize,
}

/// One bridging iteration of the terminal-subset walk on X: from the current
/// anchor, race two candidate extensions (jump to the pivot's right end vs.
/// start at the last covered terminal) and keep the cheaper one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgeIteration {
    /// x position the iteration starts from.
    pub anchor: usize,
    /// y index whose interval currently carries the walk.
    pub pivot: usize,
    /// Next terminal position the walk must reach.
    pub target: usize,
    pub p_start: usize,
    pub q_start: usize,
    pub s1: Vec<Vertex>,
    pub s2: Vec<Vertex>,
    /// True when the jump branch (s1) won the size comparison.
    pub chose_jump: bool,
    /// y index added when the winning branch closed on the target.
    pub closing: usize,
    pub next_anchor: usize,
    /// 1-based rank (among sorted terminals) of the last terminal covered
    /// after the iteration.
    pub next_rank: usize,
}

/// One row of the marking scan used when every y is a terminal. `y` is None
/// on the final row, which records loop exit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkEvent {
    pub step: usize,
    pub y: Option<usize>,
    pub already_marked: bool,
    pub added: Option<usize>,
    pub newly_marked: Vec<usize>,
    pub note: String,
}

/// Candidate classification at the final table cell, fixed per instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceClass {
    /// Only predecessors spanning past the final cell's right end exist.
    SpanningOnly,
    /// Only predecessors ending inside the final cell exist.
    InnerOnly,
    /// Both kinds exist.
    BothKinds,
    /// Every terminal touches the first window position; one stab suffices.
    WindowStart,
}

/// How the emitted vertex set was assembled from the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanShape {
    /// Chain walked from the table with connectors pinned at cell left ends,
    /// uncovered terminals stabbed one at a time.
    Canonical,
    /// Same chain, but connectors re-placed jointly with the stabbing duties;
    /// adopted because it needed strictly fewer extra vertices.
    Refitted,
    /// Plan built by the exact whole-window search; adopted because it beat
    /// every plan that keeps the table's chain.
    Synthesized,
}

/// Which rule produced an f value, or which branch a chain step took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellCase {
    /// First table row; no connector vertex.
    Base,
    /// Connected through a predecessor spanning past the cell's right end;
    /// the evaluated interval itself stays out of the solution.
    Spanning,
    /// Connected through a predecessor ending inside the cell; the evaluated
    /// interval joins the solution (free if it is a terminal).
    Inner,
}

/// Per-interval table entry with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FEntry {
    /// Original y index of the evaluated interval.
    pub y: usize,
    /// (l, r) of the interval in window coordinates; doubles as the cell key.
    pub cell: (usize, usize),
    pub terminal: bool,
    pub f: usize,
    pub case: CellCase,
    pub spanning_available: bool,
    pub inner_available: bool,
    /// Original y index of the minimizing predecessor, if any.
    pub via: Option<usize>,
    pub via_cell: Option<(usize, usize)>,
}

/// Cell-level minimum over co-located intervals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpCell {
    pub i: usize,
    pub j: usize,
    pub f_min: usize,
    /// Original y index of the interval attaining the minimum (terminals
    /// preferred on ties, then table order).
    pub winner: usize,
}

/// One step of the bottom-up solution walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub cell: (usize, usize),
    pub evaluated: usize,
    pub case: CellCase,
    /// Original x position added at this step, if any.
    pub added_x: Option<usize>,
    /// Original y index added at this step, if any.
    pub added_y: Option<usize>,
}

/// One stab of the coverage patch: the lowest-reaching uncovered terminal and
/// the position chosen inside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatchStep {
    pub terminal: usize,
    /// Original x position added.
    pub stabbed: usize,
    /// Terminals newly covered by the stab.
    pub covered: Vec<usize>,
}

/// Everything the interval dynamic program computed, in window coordinates
/// (position 1 is `window_offset` in the original graph).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpArtifacts {
    pub window_offset: usize,
    pub window_length: usize,
    /// Original indices of the windowed intervals in processing order.
    pub sigma: Vec<usize>,
    /// Original indices excluded because they lie entirely left of the window.
    pub dropped: Vec<usize>,
    pub instance_class: InstanceClass,
    pub f_entries: Vec<FEntry>,
    pub cells: Vec<DpCell>,
    pub final_cell: (usize, usize),
    /// Table value at the final cell: size of the chain part of the solution.
    pub answer: usize,
    pub chain: Vec<ChainStep>,
    pub patches: Vec<PatchStep>,
    pub plan: PlanShape,
    /// Number of f computations performed; equals `f_entries.len()` when each
    /// subproblem is computed exactly once.
    pub computed_entries: usize,
}

/// Replayable record of how a solver reached its answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trace {
    /// Instance answered by a guard, no algorithm run.
    Trivial { reason: String },
    /// Rightward far-reach walk (all of X terminal).
    RightWalk {
        steps: Vec<WalkStep>,
    },
    /// Terminal-to-terminal bridging walk (proper subset of X).
    BridgeWalk {
        start: usize,
        first_pivot: usize,
        initial_rank: usize,
        terminal_count: usize,
        iterations: Vec<BridgeIteration>,
    },
    /// Sorted marking scan (all of Y terminal).
    MarkScan {
        /// Original y indices in scan order.
        order: Vec<usize>,
        events: Vec<MarkEvent>,
    },
    /// Interval dynamic program (proper subset of Y).
    Dp(DpArtifacts),
    /// Mixed terminals solved on a lifted graph; `forced` lists the x
    /// positions whose pendant terminals pin them into the lifted solution.
    Lifted {
        forced: Vec<usize>,
        inner: Box<Trace>,
    },
}

/// A Steiner set together with its witness tree and trace.
///
/// Invariants, enforced by [`SteinerResult::checked`]: the set is disjoint
/// from the terminals, and terminals plus set induce a connected subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SteinerResult {
    pub steiner_set: BTreeSet<Vertex>,
    pub size: usize,
    /// (parent, child) edges of a spanning tree of the induced subgraph on
    /// terminals plus set.
    pub witness_tree: Vec<(Vertex, Vertex)>,
    pub trace: Trace,
}

impl SteinerResult {
    /// Validates the solver postconditions and derives the witness tree.
    pub fn checked<G: Adjacency<V = Vertex>>(
        graph: &G,
        terminals: &BTreeSet<Vertex>,
        steiner_set: BTreeSet<Vertex>,
        trace: Trace,
    ) -> Result<Self, SolveError> {
        if let Some(v) = steiner_set.intersection(terminals).next() {
            return Err(SolveError::Internal(format!(
                "steiner set contains terminal {v}"
            )));
        }
        let mut joined: BTreeSet<Vertex> = terminals.clone();
        joined.extend(steiner_set.iter().copied());
        if !graph.induced_connected(&joined) {
            return Err(SolveError::Internal(
                "terminals and steiner set do not induce a connected subgraph".to_string(),
            ));
        }
        let witness = witness_tree(graph, &joined);
        Ok(SteinerResult {
            size: steiner_set.len(),
            steiner_set,
            witness_tree: witness,
            trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ConvexBipartiteGraph, Interval};

    fn graph(m: usize, ivs: &[(usize, usize)]) -> ConvexBipartiteGraph {
        ConvexBipartiteGraph::new(m, ivs.iter().map(|&(l, r)| Interval::new(l, r)).collect())
            .unwrap()
    }

    #[test]
    fn checked_accepts_valid_solution() {
        let g = graph(3, &[(1, 2), (2, 3)]);
        let r = BTreeSet::from([Vertex::X(1), Vertex::X(3)]);
        // y-vertices never touch each other, so the bridge x2 is required
        let s = BTreeSet::from([Vertex::Y(1), Vertex::X(2), Vertex::Y(2)]);
        let res = SteinerResult::checked(
            &g,
            &r,
            s,
            Trace::Trivial {
                reason: "test".to_string(),
            },
        )
        .unwrap();
        assert_eq!(res.size, 3);
        assert_eq!(res.witness_tree.len(), 4);
    }

    #[test]
    fn checked_rejects_terminal_overlap_and_disconnection() {
        let g = graph(3, &[(1, 2), (2, 3)]);
        let r = BTreeSet::from([Vertex::X(1), Vertex::X(3)]);
        let overlapping = BTreeSet::from([Vertex::X(1)]);
        assert!(matches!(
            SteinerResult::checked(
                &g,
                &r,
                overlapping,
                Trace::Trivial {
                    reason: String::new()
                }
            ),
            Err(SolveError::Internal(_))
        ));
        let disconnected = BTreeSet::from([Vertex::Y(1)]);
        assert!(matches!(
            SteinerResult::checked(
                &g,
                &r,
                disconnected,
                Trace::Trivial {
                    reason: String::new()
                }
            ),
            Err(SolveError::Internal(_))
        ));
    }

    #[test]
    fn traces_serialize_with_kind_tags() {
        let t = Trace::RightWalk {
            steps: vec![WalkStep {
                at: 1,
                chose: 2,
                reach: 3,
            }],
        };
        let json = serde_json::to_value(&t).unwrap();
        assert_eq!(json["kind"], "right_walk");
        assert_eq!(json["steps"][0]["chose"], 2);
    }
}

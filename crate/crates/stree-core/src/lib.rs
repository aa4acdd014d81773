//! Minimum Steiner sets in convex bipartite graphs.
//!
//! Given a convex bipartite graph and a terminal set R, the solvers find a
//! smallest vertex set S, disjoint from R, whose union with R induces a
//! connected subgraph. Each terminal mix gets its own algorithm:
//!
//! * all of X: a rightward far-reach walk ([`solve_all_x`]),
//! * a proper subset of X: a terminal-bridging walk with two racing
//!   branches per gap ([`solve_subset_x`]),
//! * all of Y: a marking scan over intervals by right end ([`solve_all_y`]),
//! * a proper subset of Y: a windowed dynamic program plus a stabbing
//!   patch ([`solve_subset_y`]),
//! * mixed: pendant lifting onto the Y side ([`lift_mixed_terminals`]).
//!
//! [`solve_general`] dispatches on the mix. Every solver returns a
//! [`SteinerResult`] carrying the set, a witness tree, and a replayable
//! trace of its decisions.
//!
//! Around the solvers: brute-force oracles for cross-checking
//! ([`min_steiner_brute`] and friends), seeded instance generators, and
//! reductions from interval-graph Steiner questions, domination, and vertex
//! cover.

#![forbid(unsafe_code)]

pub mod dp;
pub mod error;
pub mod gen;
pub mod graph;
pub mod greedy;
pub mod oracle;
pub mod reductions;
pub mod solution;

pub use dp::{classify, sigma_order, solve_subset_y};
pub use error::{GenError, GraphError, OracleError, SolveError};
pub use graph::{
    validate_convex, validate_k_star_caterpillar_convex, witness_tree, Adjacency, Caterpillar,
    ConvexBipartiteGraph, FarReach, GeneralGraph, Interval, IntervalGraphModel, ValidationReport,
    Vertex,
};
pub use greedy::{solve_all_x, solve_all_y, solve_subset_x};
pub use oracle::{
    min_dominating_brute, min_steiner_brute, min_vertex_cover_brute, OracleResult,
    MAX_ORACLE_CANDIDATES, MAX_ORACLE_VERTICES, MAX_SUBSET_ORACLE_VERTICES,
};
pub use reductions::{
    dominating_set_via_stree, interval_to_convex_bipartite, lift_mixed_terminals, solve_general,
    solve_interval_steiner, terminal_case, vc_to_caterpillar_stree, DominationResult,
    GadgetVertex, IntervalReduction, IntervalSteinerResult, StarGraph, VcReduction,
};
pub use solution::{
    BridgeIteration, CellCase, ChainStep, DpArtifacts, DpCell, FEntry, InstanceClass, MarkEvent,
    PatchStep, PlanShape, SteinerResult, TerminalCase, Trace, WalkStep,
};
pub use gen::{
    gen_convex_bipartite, gen_general_graph, gen_interval_family, gen_terminals, GenConfig,
};

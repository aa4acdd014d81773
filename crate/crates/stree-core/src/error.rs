//! Error types shared across the crate.
//!
//! Four families: structural problems with a graph, solver-level failures,
//! oracle guards, and generator infeasibility. The CLI maps each family to a
//! distinct exit code.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("interval y{y} = [{l},{r}] out of bounds for m={m}")]
    IntervalOutOfBounds { y: usize, l: usize, r: usize, m: usize },
    #[error("vertex {0} out of range")]
    IndexOutOfRange(String),
    #[error("x{0} has no neighbors (disconnected input)")]
    EmptyNeighborhood(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("empty interval family")]
    EmptyFamily,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0},{1}}}")]
    DuplicateEdge(usize, usize),
    #[error("graph has no edges")]
    Edgeless,
    #[error("caterpillar structure invalid: {0}")]
    BadStructure(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("terminal set is empty")]
    EmptyTerminals,
    #[error("terminal {0} is not a vertex of the graph")]
    BadTerminal(String),
    #[error("wrong solver for this terminal set: {0}")]
    WrongCase(&'static str),
    /// A postcondition the algorithms guarantee on valid inputs failed.
    /// Reaching this is a bug, not a property of the instance.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle scale exceeded: {candidates} candidate vertices (cap {cap})")]
    ScaleExceeded { candidates: usize, cap: usize },
    #[error("oracle scale exceeded: {vertices} vertices (cap {cap})")]
    TooManyVertices { vertices: usize, cap: usize },
    #[error("no feasible set exists (disconnected input?)")]
    NoFeasibleSet,
    #[error("terminal set is empty")]
    EmptyTerminals,
    #[error("terminal {0} is not a vertex of the graph")]
    BadTerminal(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("infeasible terminal case: {0}")]
    InfeasibleCase(&'static str),
    #[error("invalid generator config: {0}")]
    BadConfig(&'static str),
}

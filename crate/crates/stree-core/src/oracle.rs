//! Brute-force reference solvers.
//!
//! These enumerate candidate sets in increasing cardinality and return the
//! first feasible set, so the witness is both minimum and lexicographically
//! least at its cardinality. They exist to check the fast algorithms, never
//! to be fast themselves; hard caps keep runaway inputs from hanging a test
//! run.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::OracleError;
use crate::graph::{Adjacency, GeneralGraph};

/// Cap on |V \ R| for the Steiner oracle. At 26 candidates the worst layer
/// C(26, 13) is ~10M subsets, which stays tractable only because feasible
/// sets are normally found far earlier.
pub const MAX_ORACLE_CANDIDATES: usize = 26;
/// Cap on total vertex count, bounding each connectivity probe.
pub const MAX_ORACLE_VERTICES: usize = 64;
/// Cap on vertex count for the cover and domination oracles, which enumerate
/// subsets of the whole vertex set.
pub const MAX_SUBSET_ORACLE_VERTICES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult<V: Ord> {
    /// Minimum size of a feasible set.
    pub optimum: usize,
    /// The lexicographically least feasible set of that size.
    pub witness: BTreeSet<V>,
    /// How many candidate sets were tested before the answer.
    pub explored: u64,
}

/// Minimum Steiner set by exhaustive search: the smallest S disjoint from `r`
/// such that `r ∪ S` induces a connected subgraph.
pub fn min_steiner_brute<G: Adjacency>(
    g: &G,
    r: &BTreeSet<G::V>,
) -> Result<OracleResult<G::V>, OracleError> {
    if r.is_empty() {
        return Err(OracleError::EmptyTerminals);
    }
    let vertices = g.vertices();
    let vertex_set: BTreeSet<G::V> = vertices.iter().copied().collect();
    for t in r {
        if !vertex_set.contains(t) {
            return Err(OracleError::BadTerminal(t.to_string()));
        }
    }
    if vertices.len() > MAX_ORACLE_VERTICES {
        return Err(OracleError::TooManyVertices {
            vertices: vertices.len(),
            cap: MAX_ORACLE_VERTICES,
        });
    }
    let candidates: Vec<G::V> = vertices.iter().copied().filter(|v| !r.contains(v)).collect();
    if candidates.len() > MAX_ORACLE_CANDIDATES {
        return Err(OracleError::ScaleExceeded {
            candidates: candidates.len(),
            cap: MAX_ORACLE_CANDIDATES,
        });
    }

    let mut explored = 0u64;
    for k in 0..=candidates.len() {
        // combinations() yields index-ordered subsets of a sorted slice, so
        // the first hit at size k is the lexicographically least witness
        for combo in candidates.iter().copied().combinations(k) {
            explored += 1;
            let mut joined: BTreeSet<G::V> = r.clone();
            joined.extend(combo.iter().copied());
            if g.induced_connected(&joined) {
                return Ok(OracleResult {
                    optimum: k,
                    witness: combo.into_iter().collect(),
                    explored,
                });
            }
        }
    }
    Err(OracleError::NoFeasibleSet)
}

/// Minimum vertex cover by exhaustive search over subsets in increasing size.
pub fn min_vertex_cover_brute(g: &GeneralGraph) -> Result<OracleResult<usize>, OracleError> {
    let n = g.vertex_count();
    if n > MAX_SUBSET_ORACLE_VERTICES {
        return Err(OracleError::TooManyVertices {
            vertices: n,
            cap: MAX_SUBSET_ORACLE_VERTICES,
        });
    }
    let vertices: Vec<usize> = (1..=n).collect();
    let mut explored = 0u64;
    for k in 0..=n {
        for combo in vertices.iter().copied().combinations(k) {
            explored += 1;
            let cover: BTreeSet<usize> = combo.iter().copied().collect();
            if g.edges()
                .iter()
                .all(|&(u, v)| cover.contains(&u) || cover.contains(&v))
            {
                return Ok(OracleResult {
                    optimum: k,
                    witness: cover,
                    explored,
                });
            }
        }
    }
    // k = n covers everything, so this is unreachable
    Err(OracleError::NoFeasibleSet)
}

/// Minimum dominating set by exhaustive search: smallest D such that every
/// vertex is in D or adjacent to a member of D.
pub fn min_dominating_brute<G: Adjacency>(g: &G) -> Result<OracleResult<G::V>, OracleError> {
    let vertices = g.vertices();
    if vertices.len() > MAX_SUBSET_ORACLE_VERTICES {
        return Err(OracleError::TooManyVertices {
            vertices: vertices.len(),
            cap: MAX_SUBSET_ORACLE_VERTICES,
        });
    }
    let mut explored = 0u64;
    for k in 0..=vertices.len() {
        for combo in vertices.iter().copied().combinations(k) {
            explored += 1;
            let d: BTreeSet<G::V> = combo.iter().copied().collect();
            let dominates = vertices
                .iter()
                .all(|&v| d.contains(&v) || g.neighbors(v).iter().any(|u| d.contains(u)));
            if dominates {
                return Ok(OracleResult {
                    optimum: k,
                    witness: d,
                    explored,
                });
            }
        }
    }
    Err(OracleError::NoFeasibleSet)
}

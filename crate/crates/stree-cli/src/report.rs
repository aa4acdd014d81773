//! Run reports and error-to-exit-code mapping.
//!
//! Every subcommand answers with one JSON document on stdout whose top-level
//! fields are fixed: `command` echoes the argv, `instance_digest` names the
//! input (first 16 hex digits of the SHA-256 of its canonical serialization),
//! `result` carries the subcommand's payload, `oracle` appears when a
//! cross-check was requested, and `timing_ms` appears unless the subcommand
//! promises byte-identical output. A one-line human summary goes to stderr.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use stree_core::{GenError, GraphError, OracleError, SolveError};

use crate::formats::ParseError;

#[derive(Debug, Serialize)]
pub struct RunReport {
    /// The invocation, word for word.
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance_digest: Option<String>,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

/// First 16 hex digits of the SHA-256 of the canonical instance text.
pub fn digest16(canonical: &str) -> String {
    let hash = Sha256::digest(canonical.as_bytes());
    hash[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// A failed run, sorted into the four reportable families. The variant
/// decides the exit status, so a caller can tell a typo (2) from an instance
/// the tool cannot serve (3), an oracle past its size cap (4), and a broken
/// invariant inside the library (5).
#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or unreadable input file.
    Usage(String),
    /// Input file failed to parse; carries the located diagnostic.
    Parse { path: String, err: ParseError },
    /// Well-formed input the requested computation cannot accept.
    Infeasible(String),
    /// Exhaustive search refused: the instance exceeds the oracle caps.
    OracleScale(String),
    /// A postcondition failed; a bug, not a property of the input.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            CliError::Infeasible(_) => 3,
            CliError::OracleScale(_) => 4,
            CliError::Internal(_) => 5,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(msg) => format!("error: {msg}"),
            CliError::Parse { path, err } => format!("error: {path}: {err}"),
            CliError::Infeasible(msg) => format!("error: infeasible input: {msg}"),
            CliError::OracleScale(msg) => format!("error: {msg}"),
            CliError::Internal(msg) => format!("error: internal: {msg}"),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Internal(msg) => CliError::Internal(msg),
            SolveError::Graph(g) => g.into(),
            other => CliError::Infeasible(other.to_string()),
        }
    }
}

// Structural errors out of constructors cannot reach here through a parsed
// file, but solvers also raise this family for disconnected inputs.
impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Infeasible(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::ScaleExceeded { .. } | OracleError::TooManyVertices { .. } => {
                CliError::OracleScale(e.to_string())
            }
            other => CliError::Infeasible(other.to_string()),
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        CliError::Infeasible(e.to_string())
    }
}

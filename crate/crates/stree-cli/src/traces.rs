//! Built-in fixture replays with pinned records.
//!
//! Five fixtures, one per algorithm family: a far-reach walk, a bridging
//! walk, a marking scan, the interval table, and the cover gadget. Each
//! holds its instance as canonical text and the full expected outcome as a
//! JSON literal frozen from an oracle-verified run. A replay recomputes the
//! outcome and reports every field that diverges, so a clean run proves the
//! solvers still reproduce their recorded decisions bit for bit. Replays are
//! hermetic: fixed instances, no clock, no randomness, no I/O.

use serde_json::{json, Value};

use stree_core::{
    min_steiner_brute, min_vertex_cover_brute, solve_general, terminal_case,
    validate_k_star_caterpillar_convex, vc_to_caterpillar_stree,
};

use crate::formats::{parse_instance, serialize_instance, Instance};
use crate::report::digest16;

/// One fixture's replay: its digest and whatever diverged from the record.
pub struct FixtureOutcome {
    pub name: &'static str,
    pub digest: String,
    pub diffs: Vec<String>,
}

/// Replays every fixture in a fixed order.
pub fn replay_all() -> Vec<FixtureOutcome> {
    vec![
        replay("ladder4", LADDER4, ladder4_record()),
        replay("bridge13", BRIDGE13, bridge13_record()),
        replay("scan8", SCAN8, scan8_record()),
        replay("fan7", FAN7, fan7_record()),
        replay("triangle-cover", TRIANGLE, triangle_record()),
    ]
}

fn replay(name: &'static str, text: &str, expected: Value) -> FixtureOutcome {
    let inst = parse_instance(text).expect("fixture text is well formed");
    let digest = digest16(&serialize_instance(&inst));
    let observed = match inst {
        Instance::Cbg {
            graph,
            terminals_x,
            terminals_y,
        } => {
            let case = terminal_case(&graph, &terminals_x, &terminals_y)
                .expect("fixtures carry terminals");
            match solve_general(&graph, &terminals_x, &terminals_y) {
                Ok(res) => {
                    let mut v = serde_json::to_value(&res).expect("results serialize");
                    v["case"] = json!(case.name());
                    v
                }
                Err(e) => json!({ "error": e.to_string() }),
            }
        }
        Instance::G { graph } => {
            match cover_outcome(&graph) {
                Ok(v) => v,
                Err(e) => json!({ "error": e }),
            }
        }
        Instance::Ivl { .. } => unreachable!("no ivl fixtures"),
    };
    let mut diffs = Vec::new();
    diff("", &expected, &observed, &mut diffs);
    FixtureOutcome { name, digest, diffs }
}

/// The cover gadget walked end to end: build it, check its star side really
/// is a 1-caterpillar arrangement, then settle the budget question twice,
/// once as a cover search and once as a Steiner search on the gadget.
fn cover_outcome(graph: &stree_core::GeneralGraph) -> Result<Value, String> {
    let budget = 2;
    let red = vc_to_caterpillar_stree(graph, budget).map_err(|e| e.to_string())?;
    let star = red.graph.star_side();
    let hoods = red.graph.vertex_side_neighborhoods();
    let arrangement_ok = validate_k_star_caterpillar_convex(&star, &hoods, &red.structure, 1)
        .map_err(|e| e.to_string())?;
    let cover = min_vertex_cover_brute(graph).map_err(|e| e.to_string())?;
    let steiner = min_steiner_brute(&red.graph, &red.terminals).map_err(|e| e.to_string())?;
    Ok(json!({
        "original": { "vertices": graph.vertex_count(), "edges": graph.edge_count() },
        "gadget": {
            "star_side": star.len(),
            "vertex_side": hoods.len(),
            "terminals": red.terminals.len(),
        },
        "budget": red.budget,
        "arrangement_ok": arrangement_ok,
        "cover": { "optimum": cover.optimum, "witness": cover.witness, "explored": cover.explored },
        "steiner": {
            "optimum": steiner.optimum,
            "witness": steiner.witness,
            "explored": steiner.explored,
        },
        "optima_match": cover.optimum == steiner.optimum,
        "within_budget": cover.optimum <= red.budget,
    }))
}

/// Structural JSON diff. Paths are JSON-pointer style; both missing and
/// unexpected fields count, so a record can never pass by omission.
fn diff(path: &str, expected: &Value, observed: &Value, out: &mut Vec<String>) {
    match (expected, observed) {
        (Value::Object(e), Value::Object(o)) => {
            for (k, ev) in e {
                match o.get(k) {
                    Some(ov) => diff(&format!("{path}/{k}"), ev, ov, out),
                    None => out.push(format!("{path}/{k}: missing from the replay")),
                }
            }
            for k in o.keys() {
                if !e.contains_key(k) {
                    out.push(format!("{path}/{k}: not part of the record"));
                }
            }
        }
        (Value::Array(e), Value::Array(o)) => {
            if e.len() != o.len() {
                out.push(format!(
                    "{path}: record has {} entries, replay has {}",
                    e.len(),
                    o.len()
                ));
            }
            for (i, (ev, ov)) in e.iter().zip(o).enumerate() {
                diff(&format!("{path}/{i}"), ev, ov, out);
            }
        }
        _ if expected == observed => {}
        _ => out.push(format!("{path}: record says {expected}, replay produced {observed}")),
    }
}

const LADDER4: &str = "cbg 4 4\n\
    y 1 1 2\n\
    y 2 1 3\n\
    y 3 2 4\n\
    y 4 3 4\n\
    t x 1 2 3 4\n";

/// Far-reach walk: two hops cover all four positions.
fn ladder4_record() -> Value {
    json!({
        "case": "all_x",
        "steiner_set": ["y2", "y4"],
        "size": 2,
        "witness_tree": [
            ["x1", "y2"], ["y2", "x2"], ["y2", "x3"], ["x3", "y4"], ["y4", "x4"]
        ],
        "trace": {
            "kind": "right_walk",
            "steps": [
                { "at": 1, "chose": 2, "reach": 3 },
                { "at": 3, "chose": 4, "reach": 4 }
            ]
        }
    })
}

const BRIDGE13: &str = "cbg 13 10\n\
    y 1 1 3\n\
    y 2 2 4\n\
    y 3 3 4\n\
    y 4 3 5\n\
    y 5 5 6\n\
    y 6 6 8\n\
    y 7 6 10\n\
    y 8 9 11\n\
    y 9 10 12\n\
    y 10 11 13\n\
    t x 1 3 4 6 8 11 12 13\n";

/// Bridging walk: five iterations, two of them won by the jump branch.
fn bridge13_record() -> Value {
    json!({
        "case": "subset_x",
        "steiner_set": ["x5", "x10", "y1", "y4", "y5", "y7", "y9", "y10"],
        "size": 8,
        "witness_tree": [
            ["x1", "y1"], ["y1", "x3"], ["x3", "y4"], ["y4", "x4"], ["y4", "x5"],
            ["x5", "y5"], ["y5", "x6"], ["x6", "y7"], ["y7", "x8"], ["y7", "x10"],
            ["x10", "y9"], ["y9", "x11"], ["y9", "x12"], ["x11", "y10"], ["y10", "x13"]
        ],
        "trace": {
            "kind": "bridge_walk",
            "start": 1,
            "first_pivot": 1,
            "initial_rank": 2,
            "terminal_count": 8,
            "iterations": [
                {
                    "anchor": 1, "pivot": 1, "target": 4, "p_start": 3, "q_start": 3,
                    "s1": [], "s2": [], "chose_jump": false, "closing": 4,
                    "next_anchor": 3, "next_rank": 3
                },
                {
                    "anchor": 3, "pivot": 4, "target": 6, "p_start": 5, "q_start": 4,
                    "s1": ["x5"], "s2": ["y4", "x5"], "chose_jump": true, "closing": 5,
                    "next_anchor": 5, "next_rank": 4
                },
                {
                    "anchor": 5, "pivot": 5, "target": 8, "p_start": 6, "q_start": 6,
                    "s1": [], "s2": [], "chose_jump": false, "closing": 7,
                    "next_anchor": 6, "next_rank": 5
                },
                {
                    "anchor": 6, "pivot": 7, "target": 11, "p_start": 10, "q_start": 8,
                    "s1": ["x10"], "s2": ["y7", "x10"], "chose_jump": true, "closing": 9,
                    "next_anchor": 10, "next_rank": 7
                },
                {
                    "anchor": 10, "pivot": 9, "target": 13, "p_start": 12, "q_start": 12,
                    "s1": [], "s2": [], "chose_jump": false, "closing": 10,
                    "next_anchor": 12, "next_rank": 8
                }
            ]
        }
    })
}

const SCAN8: &str = "cbg 8 5\n\
    y 1 1 2\n\
    y 2 2 4\n\
    y 3 4 6\n\
    y 4 4 7\n\
    y 5 7 8\n\
    t y 1 2 3 4 5\n";

/// Marking scan: three stabs, one skip, one final-position pass.
fn scan8_record() -> Value {
    json!({
        "case": "all_y",
        "steiner_set": ["x2", "x4", "x7"],
        "size": 3,
        "witness_tree": [
            ["x2", "y1"], ["x2", "y2"], ["y2", "x4"], ["x4", "y3"], ["x4", "y4"],
            ["y4", "x7"], ["x7", "y5"]
        ],
        "trace": {
            "kind": "mark_scan",
            "order": [1, 2, 3, 4, 5],
            "events": [
                {
                    "step": 1, "y": 1, "already_marked": false, "added": 2,
                    "newly_marked": [1, 2], "note": "unmarked interval, stab its right end"
                },
                {
                    "step": 2, "y": 2, "already_marked": true, "added": 4,
                    "newly_marked": [3, 4], "note": "next right end unreachable, stab again"
                },
                {
                    "step": 3, "y": 3, "already_marked": true, "added": null,
                    "newly_marked": [], "note": "next right end reachable from a marked interval"
                },
                {
                    "step": 4, "y": 4, "already_marked": true, "added": 7,
                    "newly_marked": [5], "note": "next right end unreachable, stab again"
                },
                {
                    "step": 5, "y": 5, "already_marked": true, "added": null,
                    "newly_marked": [], "note": "right end is the last position"
                },
                {
                    "step": 6, "y": null, "already_marked": false, "added": null,
                    "newly_marked": [], "note": "scan complete"
                }
            ]
        }
    })
}

const FAN7: &str = "cbg 7 6\n\
    y 1 1 2\n\
    y 2 2 3\n\
    y 3 3 4\n\
    y 4 4 5\n\
    y 5 5 6\n\
    y 6 2 7\n\
    t y 1 3 5\n";

/// Interval table: six entries, a three-step chain, and one coverage patch.
fn fan7_record() -> Value {
    json!({
        "case": "subset_y",
        "steiner_set": ["x2", "x3", "x5", "y6"],
        "size": 4,
        "witness_tree": [
            ["x2", "y1"], ["x2", "y6"], ["y6", "x3"], ["y6", "x5"], ["x3", "y3"],
            ["x5", "y5"]
        ],
        "trace": {
            "kind": "dp",
            "window_offset": 1,
            "window_length": 7,
            "sigma": [1, 6, 2, 3, 4, 5],
            "dropped": [],
            "instance_class": "both_kinds",
            "f_entries": [
                {
                    "y": 1, "cell": [1, 2], "terminal": true, "f": 0, "case": "base",
                    "spanning_available": false, "inner_available": false,
                    "via": null, "via_cell": null
                },
                {
                    "y": 6, "cell": [2, 7], "terminal": false, "f": 2, "case": "inner",
                    "spanning_available": false, "inner_available": true,
                    "via": 1, "via_cell": [1, 2]
                },
                {
                    "y": 2, "cell": [2, 3], "terminal": false, "f": 2, "case": "inner",
                    "spanning_available": false, "inner_available": true,
                    "via": 1, "via_cell": [1, 2]
                },
                {
                    "y": 3, "cell": [3, 4], "terminal": true, "f": 3, "case": "spanning",
                    "spanning_available": true, "inner_available": true,
                    "via": 6, "via_cell": [2, 7]
                },
                {
                    "y": 4, "cell": [4, 5], "terminal": false, "f": 3, "case": "spanning",
                    "spanning_available": true, "inner_available": true,
                    "via": 6, "via_cell": [2, 7]
                },
                {
                    "y": 5, "cell": [5, 6], "terminal": true, "f": 3, "case": "spanning",
                    "spanning_available": true, "inner_available": true,
                    "via": 6, "via_cell": [2, 7]
                }
            ],
            "cells": [
                { "i": 1, "j": 2, "f_min": 0, "winner": 1 },
                { "i": 2, "j": 3, "f_min": 2, "winner": 2 },
                { "i": 2, "j": 7, "f_min": 2, "winner": 6 },
                { "i": 3, "j": 4, "f_min": 3, "winner": 3 },
                { "i": 4, "j": 5, "f_min": 3, "winner": 4 },
                { "i": 5, "j": 6, "f_min": 3, "winner": 5 }
            ],
            "final_cell": [5, 6],
            "answer": 3,
            "chain": [
                {
                    "cell": [5, 6], "evaluated": 5, "case": "spanning",
                    "added_x": 5, "added_y": null
                },
                {
                    "cell": [2, 7], "evaluated": 6, "case": "inner",
                    "added_x": 2, "added_y": 6
                },
                {
                    "cell": [1, 2], "evaluated": 1, "case": "base",
                    "added_x": null, "added_y": null
                }
            ],
            "patches": [
                { "terminal": 3, "stabbed": 3, "covered": [3] }
            ],
            "plan": "canonical",
            "computed_entries": 6
        }
    })
}

const TRIANGLE: &str = "g 3 3\n\
    e 1 2\n\
    e 1 3\n\
    e 2 3\n";

/// Cover gadget on the triangle: both searches settle on two vertices.
fn triangle_record() -> Value {
    json!({
        "original": { "vertices": 3, "edges": 3 },
        "gadget": { "star_side": 12, "vertex_side": 3, "terminals": 7 },
        "budget": 2,
        "arrangement_ok": true,
        "cover": { "optimum": 2, "witness": [1, 2], "explored": 5 },
        "steiner": { "optimum": 2, "witness": ["x1", "x2"], "explored": 10 },
        "optima_match": true,
        "within_budget": true
    })
}

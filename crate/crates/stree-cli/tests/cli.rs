//! End-to-end runs of the `stree` binary: report shape, exit codes, file
//! round trips, and the hermetic fixture replay.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn stree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stree"))
        .args(args)
        // the override test opts back in explicitly
        .env_remove("STREE_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn report(out: &Output) -> Value {
    serde_json::from_str(&stdout(out))
        .unwrap_or_else(|e| panic!("stdout is not one JSON document: {e}\n{}", stdout(out)))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).expect("fixture write");
    path
}

fn path_arg(p: &Path) -> &str {
    p.to_str().expect("utf8 path")
}

const SCAN8: &str = "cbg 8 5\ny 1 1 2\ny 2 2 4\ny 3 4 6\ny 4 4 7\ny 5 7 8\nt y 1 2 3 4 5\n";
const FAN7: &str = "cbg 7 6\ny 1 1 2\ny 2 2 3\ny 3 3 4\ny 4 4 5\ny 5 5 6\ny 6 2 7\nt y 1 3 5\n";

#[test]
fn solve_reports_the_marking_scan_solution() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "scan.cbg", SCAN8);
    let out = stree(&["solve", "--graph", path_arg(&file)]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let rep = report(&out);
    assert_eq!(rep["command"][1], "solve");
    let digest = rep["instance_digest"].as_str().unwrap();
    assert_eq!(digest.len(), 16);
    assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
    assert!(rep["timing_ms"].as_f64().unwrap() >= 0.0);
    assert!(rep.get("oracle").is_none());

    let result = &rep["result"];
    assert_eq!(result["case"], "all_y");
    assert_eq!(result["size"], 3);
    assert_eq!(result["steiner_set"], serde_json::json!(["x2", "x4", "x7"]));
    assert_eq!(result["trace"]["kind"], "mark_scan");
    assert!(stderr(&out).contains("size 3"));
}

#[test]
fn solve_cross_checks_against_the_oracle() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "fan.cbg", FAN7);
    let out = stree(&["solve", "--graph", path_arg(&file), "--oracle"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let rep = report(&out);
    assert_eq!(rep["oracle"]["optimum"], 4);
    assert_eq!(rep["oracle"]["matches"], true);
    assert_eq!(rep["result"]["size"], 4);
    assert!(stderr(&out).contains("oracle agrees"));
}

#[test]
fn terminal_flag_overrides_the_file_lines() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "fan.cbg", FAN7);
    let out = stree(&["solve", "--graph", path_arg(&file), "--terminals", "all-x"]);
    assert_eq!(code(&out), 0);
    let rep = report(&out);
    assert_eq!(rep["result"]["case"], "all_x");
    assert_eq!(rep["result"]["trace"]["kind"], "right_walk");
}

#[test]
fn parse_errors_point_at_the_token_and_exit_2() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "bad.cbg", "cbg 3 2\ny 1 3 2\ny 2 2 3\n");
    let out = stree(&["solve", "--graph", path_arg(&file)]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).is_empty(), "no report on failure");
    let err = stderr(&out);
    assert!(err.contains("line 2, column 5"), "stderr: {err}");
    assert!(err.contains("left end 3 exceeds right end 2"), "stderr: {err}");
}

#[test]
fn usage_errors_exit_2_and_help_exits_0() {
    let out = stree(&["solve", "--no-such-flag"]);
    assert_eq!(code(&out), 2);
    let out = stree(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("solve"));
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "fam.ivl", "ivl 2\nv 1 1 3\nv 2 2 5\n");
    let out = stree(&["solve", "--graph", path_arg(&file)]);
    assert_eq!(code(&out), 2, "solve rejects non-cbg instances as usage");
    assert!(stderr(&out).contains("holds ivl"));
}

#[test]
fn terminal_free_instances_exit_3() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "plain.cbg", "cbg 3 2\ny 1 1 2\ny 2 2 3\n");
    let out = stree(&["solve", "--graph", path_arg(&file)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("no terminals"));
}

#[test]
fn disconnected_instances_exit_3() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "split.cbg", "cbg 4 2\ny 1 1 1\ny 2 3 4\nt x 1 4\n");
    let out = stree(&["solve", "--graph", path_arg(&file)]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
}

#[test]
fn oracle_scale_cap_exits_4() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "wide.cbg", "cbg 40 2\ny 1 1 40\ny 2 1 40\nt y 1 2\n");
    let out = stree(&["oracle", "--graph", path_arg(&file)]);
    assert_eq!(code(&out), 4, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("scale"));

    // the solver itself has no such cap: one stab joins both intervals
    let out = stree(&["solve", "--graph", path_arg(&file)]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["result"]["size"], 1);
}

#[test]
fn gen_writes_an_instance_the_solver_accepts() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("gen.cbg");
    let out = stree(&[
        "gen", "cbg", "--m", "8", "--n", "6", "--seed", "42", "--connect", "--case",
        "subset-y", "--out", path_arg(&file),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let gen_rep = report(&out);
    assert_eq!(gen_rep["result"]["connected"], true);
    assert_eq!(gen_rep["result"]["case"], "subset_y");
    assert_eq!(gen_rep["result"]["path"], serde_json::json!(path_arg(&file)));

    let out = stree(&["solve", "--graph", path_arg(&file), "--oracle"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let solve_rep = report(&out);
    assert_eq!(solve_rep["oracle"]["matches"], true);
    assert_eq!(
        solve_rep["instance_digest"], gen_rep["instance_digest"],
        "gen and solve agree on the instance's identity"
    );
}

#[test]
fn gen_is_deterministic_and_honours_the_seed_env() {
    let first = stree(&["gen", "cbg", "--m", "6", "--n", "4", "--seed", "7"]);
    let second = stree(&["gen", "cbg", "--m", "6", "--n", "4", "--seed", "7"]);
    assert_eq!(code(&first), 0);
    let a = report(&first);
    let b = report(&second);
    assert_eq!(a["result"]["instance"], b["result"]["instance"]);
    assert_eq!(a["instance_digest"], b["instance_digest"]);

    let overridden = Command::new(env!("CARGO_BIN_EXE_stree"))
        .args(["gen", "cbg", "--m", "6", "--n", "4", "--seed", "9"])
        .env("STREE_SEED", "7")
        .output()
        .expect("binary runs");
    assert_eq!(code(&overridden), 0);
    let c = report(&overridden);
    assert_eq!(c["result"]["seed"], 7);
    assert_eq!(c["result"]["seed_source"], "env");
    assert_eq!(c["result"]["instance"], a["result"]["instance"]);

    let bad = Command::new(env!("CARGO_BIN_EXE_stree"))
        .args(["gen", "cbg", "--m", "6", "--n", "4"])
        .env("STREE_SEED", "pi")
        .output()
        .expect("binary runs");
    assert_eq!(code(&bad), 2);
}

#[test]
fn gen_rejects_infeasible_terminal_cases_with_exit_3() {
    let out = stree(&["gen", "cbg", "--m", "1", "--n", "3", "--case", "subset-x"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("infeasible"));
}

#[test]
fn gen_covers_the_other_two_formats() {
    let dir = TempDir::new().unwrap();
    let ivl = dir.path().join("fam.ivl");
    let out = stree(&[
        "gen", "ivl", "--n", "5", "--seed", "3", "--connect", "--terminals-count", "2",
        "--out", path_arg(&ivl),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let out = stree(&["reduce", "interval", "--family", path_arg(&ivl), "--oracle"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(report(&out)["oracle"]["matches"], true);

    let g = dir.path().join("graph.g");
    let out = stree(&[
        "gen", "g", "--vertices", "5", "--edges", "6", "--seed", "4", "--out", path_arg(&g),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let out = stree(&["reduce", "vc", "--graph", path_arg(&g), "--k", "4"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(report(&out)["result"]["optima_match"], true);
}

#[test]
fn reduce_vc_decides_the_triangle_budget() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "tri.g", "g 3 3\ne 1 2\ne 1 3\ne 2 3\n");
    let out = stree(&["reduce", "vc", "--graph", path_arg(&file), "--k", "2"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let rep = report(&out);
    assert_eq!(rep["result"]["cover"]["optimum"], 2);
    assert_eq!(rep["result"]["steiner"]["optimum"], 2);
    assert_eq!(rep["result"]["within_budget"], true);
    assert_eq!(rep["result"]["arrangement_ok"], true);

    let out = stree(&["reduce", "vc", "--graph", path_arg(&file), "--k", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["result"]["within_budget"], false);
}

#[test]
fn reduce_interval_solves_through_the_image() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "fam.ivl",
        "ivl 4\nv 1 0 2\nv 2 1 4\nv 3 3 6\nv 4 5 8\nt v 1 4\n",
    );
    let out = stree(&["reduce", "interval", "--family", path_arg(&file), "--oracle"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let rep = report(&out);
    assert_eq!(rep["result"]["size"], 2);
    assert_eq!(rep["result"]["steiner_set"], serde_json::json!([2, 3]));
    assert_eq!(rep["result"]["image"]["case"], "subset_y");
    assert_eq!(rep["oracle"]["matches"], true);
    // image positions are the sorted distinct endpoints
    assert_eq!(
        rep["result"]["positions"],
        serde_json::json!([0, 1, 2, 3, 4, 5, 6, 8])
    );
}

#[test]
fn reduce_dominate_reports_the_known_gap() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "chain.cbg", "cbg 3 2\ny 1 1 2\ny 2 2 3\n");
    let out = stree(&["reduce", "dominate", "--graph", path_arg(&file), "--oracle"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let rep = report(&out);
    assert_eq!(rep["result"]["size"], 3);
    assert_eq!(rep["oracle"]["optimum"], 2);
    assert_eq!(rep["oracle"]["gap"], 1);
}

#[test]
fn validate_checks_convexity_and_arrangements() {
    let dir = TempDir::new().unwrap();
    let graph = write(&dir, "v.cbg", "cbg 3 2\ny 1 1 2\ny 2 1 3\n");
    let out = stree(&["validate", "--graph", path_arg(&graph)]);
    assert_eq!(code(&out), 0);
    let rep = report(&out);
    assert_eq!(rep["result"]["ok"], true);
    assert_eq!(rep["result"]["connected"], true);

    let path_cat = write(&dir, "path.cat", "cat 0\nbb 1 2 3\n");
    let out = stree(&[
        "validate", "--graph", path_arg(&graph), "--structure", path_arg(&path_cat),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let rep = report(&out);
    assert_eq!(rep["result"]["structure"]["neighborhoods_are_subtrees"], true);
    assert_eq!(rep["result"]["ok"], true);

    // scrambling the backbone breaks the subtree property for y1 = {1, 2}
    let bad_cat = write(&dir, "scramble.cat", "cat 0\nbb 1 3 2\n");
    let out = stree(&[
        "validate", "--graph", path_arg(&graph), "--structure", path_arg(&bad_cat),
    ]);
    assert_eq!(code(&out), 0);
    let rep = report(&out);
    assert_eq!(rep["result"]["structure"]["neighborhoods_are_subtrees"], false);
    assert_eq!(rep["result"]["ok"], false);

    // a backbone that misses x3 is a structural error, not a verdict
    let short_cat = write(&dir, "short.cat", "cat 0\nbb 1 2\n");
    let out = stree(&[
        "validate", "--graph", path_arg(&graph), "--structure", path_arg(&short_cat),
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));

    // one pendant per spine vertex, every hood closing over its pendant
    let star_graph = write(&dir, "star.cbg", "cbg 4 3\ny 1 1 2\ny 2 3 4\ny 3 1 3\n");
    let star_cat = write(&dir, "star.cat", "cat 1\nbb 1 3\npd 1 2\npd 3 4\n");
    let out = stree(&[
        "validate", "--graph", path_arg(&star_graph), "--structure", path_arg(&star_cat),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let rep = report(&out);
    assert_eq!(rep["result"]["structure"]["k"], 1);
    assert_eq!(rep["result"]["structure"]["neighborhoods_are_subtrees"], true);
    assert_eq!(rep["result"]["ok"], true);
}

#[test]
fn dump_table_tsv_replaces_the_report() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "fan.cbg", FAN7);
    let out = stree(&[
        "solve", "--graph", path_arg(&file), "--dump-table", "--format", "tsv",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("y\tl\tr\tterminal\tf\tcase\tvia\tvia_l\tvia_r\n"));
    assert_eq!(text.lines().count(), 7, "header plus six entries");
    assert!(!text.contains('{'), "tsv output carries no JSON");

    let out = stree(&["solve", "--graph", path_arg(&file), "--dump-table"]);
    assert_eq!(code(&out), 0);
    let rep = report(&out);
    assert_eq!(rep["result"]["table"]["answer"], 3);
    assert_eq!(rep["result"]["table"]["f_entries"].as_array().unwrap().len(), 6);

    // --format without --dump-table is a usage error
    let out = stree(&["solve", "--graph", path_arg(&file), "--format", "tsv"]);
    assert_eq!(code(&out), 2);

    // walks build no table
    let out = stree(&[
        "solve", "--graph", path_arg(&file), "--terminals", "all-x", "--dump-table",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("builds no table"));
}

#[test]
fn traces_replay_is_byte_identical_and_clean() {
    let first = stree(&["traces"]);
    assert_eq!(code(&first), 0, "stderr: {}", stderr(&first));
    let second = stree(&["traces"]);
    assert_eq!(first.stdout, second.stdout, "reports differ between runs");

    let rep = report(&first);
    assert_eq!(rep["result"]["ok"], true);
    let fixtures = rep["result"]["fixtures"].as_array().unwrap();
    assert_eq!(fixtures.len(), 5);
    for f in fixtures {
        assert_eq!(f["ok"], true, "fixture {} diverged: {}", f["name"], f["diffs"]);
    }
    assert!(rep.get("timing_ms").is_none(), "traces reports carry no timing");
    assert!(stdout(&first).ends_with("}\n"), "single JSON document");
}

//! `stree`: command line front end for the convex bipartite Steiner solvers.
//!
//! Every subcommand prints one JSON report on stdout and a one-line summary
//! on stderr. Exit status sorts failures into families: 2 for usage and
//! parse errors, 3 for well-formed input the computation cannot accept,
//! 4 for instances past the exhaustive-search caps, 5 for broken internal
//! invariants.

mod formats;
mod report;
mod traces;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use stree_core::{
    dominating_set_via_stree, gen_convex_bipartite, gen_general_graph, gen_interval_family,
    gen_terminals, min_dominating_brute, min_steiner_brute, min_vertex_cover_brute,
    solve_general, solve_interval_steiner, terminal_case, validate_k_star_caterpillar_convex,
    vc_to_caterpillar_stree, CellCase, DpArtifacts, GenConfig, Trace, TerminalCase, Vertex,
};

use formats::{parse_caterpillar, parse_instance, serialize_instance, Instance};
use report::{digest16, CliError, RunReport};

/// Salt folded into the seed for the terminal draw, so the graph shape stays
/// put when only the terminal case changes.
const TERMINAL_SALT: u64 = 0x7465_726d;

#[derive(Parser)]
#[command(
    name = "stree",
    version,
    about = "Minimum Steiner sets in convex bipartite graphs",
    long_about = "Minimum Steiner sets in convex bipartite graphs: solvers for every \
                  terminal mix, exhaustive oracles, seeded generators, reductions from \
                  interval-graph Steiner questions, domination, and vertex cover.\n\n\
                  Each run prints a single JSON report on stdout and a one-line summary \
                  on stderr. Exit codes: 0 success, 2 usage or parse error, 3 infeasible \
                  input, 4 oracle scale exceeded, 5 internal invariant failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve minimum Steiner connectivity on a cbg instance
    Solve(SolveArgs),
    /// Exhaustive minimum Steiner search, for cross-checking small instances
    Oracle(OracleArgs),
    /// Generate a seeded random instance
    #[command(subcommand)]
    Gen(GenCmd),
    /// Recast another problem as Steiner connectivity and solve it
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Check structural properties of an instance
    Validate(ValidateArgs),
    /// Replay the built-in fixtures against their pinned records
    ///
    /// Hermetic and byte-identical across runs: fixed instances, no clock,
    /// no randomness. Exits 5 if any replay diverges from its record.
    Traces,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file in cbg format
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    /// Terminals: all-x, all-y, x=1,2, y=1,4, or x=1,2;y=3
    /// (defaults to the file's t lines)
    #[arg(long, value_name = "SPEC")]
    terminals: Option<String>,
    /// Cross-check the answer against the exhaustive oracle
    #[arg(long)]
    oracle: bool,
    /// Dump the interval table (built on the subset-of-Y and mixed routes)
    #[arg(long)]
    dump_table: bool,
    /// Table dump format; tsv replaces the JSON report on stdout
    #[arg(long, value_enum, default_value_t = TableFormat::Json, requires = "dump_table")]
    format: TableFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Json,
    Tsv,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file in cbg or ivl format
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    /// Terminals: cbg takes all-x, all-y, x=…, y=…; ivl takes all-v or v=…
    #[arg(long, value_name = "SPEC")]
    terminals: Option<String>,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Random convex bipartite graph (cbg format)
    Cbg(GenCbgArgs),
    /// Random interval family (ivl format)
    Ivl(GenIvlArgs),
    /// Random general graph (g format), for the cover reduction
    G(GenGArgs),
}

#[derive(Args)]
struct GenCbgArgs {
    /// Position count
    #[arg(long)]
    m: usize,
    /// Interval count
    #[arg(long)]
    n: usize,
    /// Interval length scale, in (0, 1]
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// RNG seed; the STREE_SEED environment variable overrides this flag
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Widen intervals until the graph is connected
    #[arg(long)]
    connect: bool,
    /// Draw a terminal set of this shape into the instance's t lines
    #[arg(long, value_enum, value_name = "CASE")]
    case: Option<CaseArg>,
    /// Write the instance here instead of embedding it in the report
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenIvlArgs {
    /// Interval count
    #[arg(long)]
    n: usize,
    /// Interval length scale, in (0, 1]
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// RNG seed; the STREE_SEED environment variable overrides this flag
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stretch intervals until the family overlaps into one component
    #[arg(long)]
    connect: bool,
    /// Draw this many terminal intervals into the instance's t v line
    #[arg(long, value_name = "COUNT")]
    terminals_count: Option<usize>,
    /// Write the instance here instead of embedding it in the report
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenGArgs {
    /// Upper bound on the vertex count (at least 2)
    #[arg(long)]
    vertices: usize,
    /// Upper bound on the edge count (at least 1)
    #[arg(long)]
    edges: usize,
    /// RNG seed; the STREE_SEED environment variable overrides this flag
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the instance here instead of embedding it in the report
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    AllX,
    SubsetX,
    AllY,
    SubsetY,
    Mixed,
}

impl From<CaseArg> for TerminalCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::AllX => TerminalCase::AllX,
            CaseArg::SubsetX => TerminalCase::SubsetX,
            CaseArg::AllY => TerminalCase::AllY,
            CaseArg::SubsetY => TerminalCase::SubsetY,
            CaseArg::Mixed => TerminalCase::Mixed,
        }
    }
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// Decide a vertex cover budget through the star-composition gadget
    Vc(ReduceVcArgs),
    /// Solve interval-family Steiner through the convex bipartite image
    Interval(ReduceIntervalArgs),
    /// Build a dominating set from the two all-terminal sweeps
    Dominate(ReduceDominateArgs),
}

#[derive(Args)]
struct ReduceVcArgs {
    /// Instance file in g format
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    /// Cover budget to decide
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct ReduceIntervalArgs {
    /// Instance file in ivl format
    #[arg(long, value_name = "FILE")]
    family: PathBuf,
    /// Terminals: all-v or v=1,2 (defaults to the file's t v line)
    #[arg(long, value_name = "SPEC")]
    terminals: Option<String>,
    /// Cross-check against the exhaustive oracle on the intersection graph
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct ReduceDominateArgs {
    /// Instance file in cbg format (terminal lines are ignored)
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    /// Also compute the exact minimum and report the gap
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Instance file in cbg, ivl, or g format
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    /// Caterpillar sidecar (cat format) to check against a cbg's x side
    #[arg(long, value_name = "FILE")]
    structure: Option<PathBuf>,
}

/// What a successful run hands back to `main` for printing.
enum Output {
    Json {
        report: RunReport,
        summary: String,
        /// Fill `timing_ms` before printing. Off for byte-identical reports.
        timed: bool,
        exit: i32,
    },
    /// A bare table on stdout instead of the JSON report.
    Tsv { table: String, summary: String },
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(run(&argv));
}

fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    match dispatch(cli.command, argv) {
        Ok(Output::Json {
            mut report,
            summary,
            timed,
            exit,
        }) => {
            if timed {
                report.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("reports serialize")
            );
            eprintln!("{summary}");
            exit
        }
        Ok(Output::Tsv { table, summary }) => {
            print!("{table}");
            eprintln!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("{}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Cmd, argv: &[String]) -> Result<Output, CliError> {
    match cmd {
        Cmd::Solve(args) => cmd_solve(args, argv),
        Cmd::Oracle(args) => cmd_oracle(args, argv),
        Cmd::Gen(args) => cmd_gen(args, argv),
        Cmd::Reduce(args) => cmd_reduce(args, argv),
        Cmd::Validate(args) => cmd_validate(args, argv),
        Cmd::Traces => cmd_traces(argv),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<(Instance, String), CliError> {
    let text = read_file(path)?;
    let inst = parse_instance(&text).map_err(|err| CliError::Parse {
        path: path.display().to_string(),
        err,
    })?;
    let digest = digest16(&serialize_instance(&inst));
    Ok((inst, digest))
}

fn wrong_kind(cmd: &str, path: &Path, wanted: &str, got: &str) -> CliError {
    CliError::Usage(format!(
        "{cmd} expects a {wanted} instance; {} holds {got}",
        path.display()
    ))
}

fn bad_cbg_spec(spec: &str) -> CliError {
    CliError::Usage(format!(
        "bad terminal spec `{spec}`; expected all-x, all-y, x=1,2, y=1,4, or x=1,2;y=3"
    ))
}

/// Resolves the terminal spec for a cbg run. The flag wins over the file's
/// t lines; having neither is an infeasible input, not a usage error, since
/// the invocation itself is fine for instances that carry terminals.
fn cbg_terminals(
    spec: Option<&str>,
    file_x: &BTreeSet<usize>,
    file_y: &BTreeSet<usize>,
    m: usize,
    n: usize,
) -> Result<(BTreeSet<usize>, BTreeSet<usize>), CliError> {
    let Some(spec) = spec else {
        if file_x.is_empty() && file_y.is_empty() {
            return Err(CliError::Infeasible(
                "no terminals: pass --terminals or add t lines to the instance".into(),
            ));
        }
        return Ok((file_x.clone(), file_y.clone()));
    };
    match spec {
        "all-x" => return Ok(((1..=m).collect(), BTreeSet::new())),
        "all-y" => return Ok((BTreeSet::new(), (1..=n).collect())),
        _ => {}
    }
    let mut xs = BTreeSet::new();
    let mut ys = BTreeSet::new();
    for part in spec.split(';') {
        let Some((side, list)) = part.split_once('=') else {
            return Err(bad_cbg_spec(spec));
        };
        let into = match side {
            "x" => &mut xs,
            "y" => &mut ys,
            _ => return Err(bad_cbg_spec(spec)),
        };
        if !into.is_empty() {
            return Err(bad_cbg_spec(spec));
        }
        for tok in list.split(',') {
            let id: usize = tok.parse().map_err(|_| bad_cbg_spec(spec))?;
            if id == 0 {
                return Err(bad_cbg_spec(spec));
            }
            into.insert(id);
        }
    }
    if xs.is_empty() && ys.is_empty() {
        return Err(bad_cbg_spec(spec));
    }
    Ok((xs, ys))
}

fn ivl_terminals(
    spec: Option<&str>,
    file_v: &BTreeSet<usize>,
    n: usize,
) -> Result<BTreeSet<usize>, CliError> {
    let bad = |spec: &str| {
        CliError::Usage(format!(
            "bad terminal spec `{spec}`; an ivl instance takes all-v or v=1,2"
        ))
    };
    let Some(spec) = spec else {
        if file_v.is_empty() {
            return Err(CliError::Infeasible(
                "no terminals: pass --terminals or add a t v line to the instance".into(),
            ));
        }
        return Ok(file_v.clone());
    };
    if spec == "all-v" {
        return Ok((1..=n).collect());
    }
    let Some(list) = spec.strip_prefix("v=") else {
        return Err(bad(spec));
    };
    let mut vs = BTreeSet::new();
    for tok in list.split(',') {
        let id: usize = tok.parse().map_err(|_| bad(spec))?;
        if id == 0 {
            return Err(bad(spec));
        }
        vs.insert(id);
    }
    if vs.is_empty() {
        return Err(bad(spec));
    }
    Ok(vs)
}

fn vertex_terminals(r_x: &BTreeSet<usize>, r_y: &BTreeSet<usize>) -> BTreeSet<Vertex> {
    r_x.iter()
        .map(|&p| Vertex::X(p))
        .chain(r_y.iter().map(|&i| Vertex::Y(i)))
        .collect()
}

fn set_text<T: std::fmt::Display>(set: impl IntoIterator<Item = T>) -> String {
    let items: Vec<String> = set.into_iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn find_table(trace: &Trace) -> Option<&DpArtifacts> {
    match trace {
        Trace::Dp(a) => Some(a),
        Trace::Lifted { inner, .. } => find_table(inner),
        _ => None,
    }
}

/// One row per table entry, in processing order, window coordinates.
fn tsv_table(a: &DpArtifacts) -> String {
    let mut out = String::from("y\tl\tr\tterminal\tf\tcase\tvia\tvia_l\tvia_r\n");
    for e in &a.f_entries {
        let case = match e.case {
            CellCase::Base => "base",
            CellCase::Spanning => "spanning",
            CellCase::Inner => "inner",
        };
        let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            e.y,
            e.cell.0,
            e.cell.1,
            e.terminal,
            e.f,
            case,
            opt(e.via),
            opt(e.via_cell.map(|c| c.0)),
            opt(e.via_cell.map(|c| c.1)),
        ));
    }
    out
}

fn json_report(
    argv: &[String],
    digest: Option<String>,
    result: Value,
    oracle: Option<Value>,
    summary: String,
) -> Output {
    Output::Json {
        report: RunReport {
            command: argv.to_vec(),
            instance_digest: digest,
            result,
            oracle,
            timing_ms: None,
        },
        summary,
        timed: true,
        exit: 0,
    }
}

fn cmd_solve(args: SolveArgs, argv: &[String]) -> Result<Output, CliError> {
    let (inst, digest) = load_instance(&args.graph)?;
    let kind = inst.kind();
    let Instance::Cbg {
        graph,
        terminals_x,
        terminals_y,
    } = inst
    else {
        return Err(wrong_kind("solve", &args.graph, "cbg", kind));
    };
    let (rx, ry) = cbg_terminals(
        args.terminals.as_deref(),
        &terminals_x,
        &terminals_y,
        graph.m(),
        graph.n(),
    )?;
    let res = solve_general(&graph, &rx, &ry)?;
    let case = terminal_case(&graph, &rx, &ry).expect("solve_general rejects empty terminals");

    let mut result = serde_json::to_value(&res).expect("results serialize");
    result["kind"] = json!("cbg");
    result["m"] = json!(graph.m());
    result["n"] = json!(graph.n());
    result["case"] = json!(case.name());
    result["terminals"] = json!({ "x": rx, "y": ry });

    let mut summary = format!(
        "{} solve on cbg(m={}, n={}): size {} set {}",
        case.name(),
        graph.m(),
        graph.n(),
        res.size,
        set_text(&res.steiner_set),
    );

    let oracle = if args.oracle {
        let brute = min_steiner_brute(&graph, &vertex_terminals(&rx, &ry))?;
        if brute.optimum != res.size {
            return Err(CliError::Internal(format!(
                "solver answered {} but the oracle found {}",
                res.size, brute.optimum
            )));
        }
        summary.push_str(" (oracle agrees)");
        Some(json!({
            "optimum": brute.optimum,
            "witness": brute.witness,
            "explored": brute.explored,
            "matches": true,
        }))
    } else {
        None
    };

    if args.dump_table {
        let table = find_table(&res.trace).ok_or_else(|| {
            CliError::Infeasible(format!(
                "the {} solver builds no table; --dump-table needs a run that takes \
                 the interval-subset route",
                case.name()
            ))
        })?;
        match args.format {
            TableFormat::Json => {
                result["table"] = serde_json::to_value(table).expect("tables serialize");
            }
            TableFormat::Tsv => {
                return Ok(Output::Tsv {
                    table: tsv_table(table),
                    summary,
                });
            }
        }
    }

    Ok(json_report(argv, Some(digest), result, oracle, summary))
}

fn cmd_oracle(args: OracleArgs, argv: &[String]) -> Result<Output, CliError> {
    let (inst, digest) = load_instance(&args.graph)?;
    match inst {
        Instance::Cbg {
            graph,
            terminals_x,
            terminals_y,
        } => {
            let (rx, ry) = cbg_terminals(
                args.terminals.as_deref(),
                &terminals_x,
                &terminals_y,
                graph.m(),
                graph.n(),
            )?;
            let brute = min_steiner_brute(&graph, &vertex_terminals(&rx, &ry))?;
            let summary = format!(
                "oracle on cbg(m={}, n={}): optimum {} witness {} ({} sets explored)",
                graph.m(),
                graph.n(),
                brute.optimum,
                set_text(&brute.witness),
                brute.explored,
            );
            let result = json!({
                "kind": "cbg",
                "m": graph.m(),
                "n": graph.n(),
                "terminals": { "x": rx, "y": ry },
                "optimum": brute.optimum,
                "witness": brute.witness,
                "explored": brute.explored,
            });
            Ok(json_report(argv, Some(digest), result, None, summary))
        }
        Instance::Ivl { model, terminals } => {
            let terms = ivl_terminals(args.terminals.as_deref(), &terminals, model.len())?;
            let brute = min_steiner_brute(&model.intersection_graph(), &terms)?;
            let summary = format!(
                "oracle on ivl(n={}): optimum {} witness {} ({} sets explored)",
                model.len(),
                brute.optimum,
                set_text(&brute.witness),
                brute.explored,
            );
            let result = json!({
                "kind": "ivl",
                "n": model.len(),
                "terminals": terms,
                "optimum": brute.optimum,
                "witness": brute.witness,
                "explored": brute.explored,
            });
            Ok(json_report(argv, Some(digest), result, None, summary))
        }
        Instance::G { .. } => Err(wrong_kind("oracle", &args.graph, "cbg or ivl", "g")),
    }
}

/// The seed actually used: STREE_SEED when set, the flag otherwise.
fn effective_seed(flag: u64) -> Result<(u64, &'static str), CliError> {
    match std::env::var("STREE_SEED") {
        Ok(text) => text.trim().parse().map(|v| (v, "env")).map_err(|_| {
            CliError::Usage(format!(
                "STREE_SEED must be an unsigned integer, found `{text}`"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok((flag, "flag")),
        Err(e) => Err(CliError::Usage(format!("STREE_SEED: {e}"))),
    }
}

fn cmd_gen(cmd: GenCmd, argv: &[String]) -> Result<Output, CliError> {
    match cmd {
        GenCmd::Cbg(args) => {
            let (seed, source) = effective_seed(args.seed)?;
            let cfg = GenConfig {
                seed,
                m: args.m,
                n: args.n,
                density: args.density,
                connect: args.connect,
            };
            let graph = gen_convex_bipartite(&cfg)?;
            let (terminals_x, terminals_y) = match args.case {
                Some(case) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ TERMINAL_SALT);
                    gen_terminals(graph.m(), graph.n(), case.into(), &mut rng)?
                }
                None => Default::default(),
            };
            let connected = graph.is_connected();
            let details = json!({
                "m": graph.m(),
                "n": graph.n(),
                "connected": connected,
                "case": args.case.map(|c| TerminalCase::from(c).name()),
            });
            let inst = Instance::Cbg {
                graph,
                terminals_x,
                terminals_y,
            };
            finish_gen(inst, seed, source, args.out, details, argv)
        }
        GenCmd::Ivl(args) => {
            let (seed, source) = effective_seed(args.seed)?;
            let cfg = GenConfig {
                seed,
                m: 1,
                n: args.n,
                density: args.density,
                connect: args.connect,
            };
            let model = gen_interval_family(&cfg)?;
            let terminals: BTreeSet<usize> = match args.terminals_count {
                Some(count) => {
                    if count > model.len() {
                        return Err(CliError::Infeasible(format!(
                            "cannot draw {count} terminals from {} intervals",
                            model.len()
                        )));
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ TERMINAL_SALT);
                    rand::seq::index::sample(&mut rng, model.len(), count)
                        .into_iter()
                        .map(|i| i + 1)
                        .collect()
                }
                None => BTreeSet::new(),
            };
            let details = json!({
                "n": model.len(),
                "terminals": terminals.len(),
                "connected": model.intersection_graph().is_connected(),
            });
            let inst = Instance::Ivl { model, terminals };
            finish_gen(inst, seed, source, args.out, details, argv)
        }
        GenCmd::G(args) => {
            let (seed, source) = effective_seed(args.seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let graph = gen_general_graph(&mut rng, args.vertices, args.edges)?;
            let details = json!({
                "vertices": graph.vertex_count(),
                "edges": graph.edge_count(),
                "connected": graph.is_connected(),
            });
            let inst = Instance::G { graph };
            finish_gen(inst, seed, source, args.out, details, argv)
        }
    }
}

fn finish_gen(
    inst: Instance,
    seed: u64,
    seed_source: &str,
    out: Option<PathBuf>,
    details: Value,
    argv: &[String],
) -> Result<Output, CliError> {
    let text = serialize_instance(&inst);
    let digest = digest16(&text);
    let mut result = json!({
        "kind": inst.kind(),
        "seed": seed,
        "seed_source": seed_source,
    });
    let fields = result.as_object_mut().expect("object literal");
    for (k, v) in details.as_object().expect("object literal") {
        fields.insert(k.clone(), v.clone());
    }
    let mut summary = format!("generated {} instance {digest} (seed {seed})", inst.kind());
    match out {
        Some(path) => {
            std::fs::write(&path, &text).map_err(|e| {
                CliError::Usage(format!("cannot write {}: {e}", path.display()))
            })?;
            fields.insert("path".into(), json!(path.display().to_string()));
            summary.push_str(&format!(", wrote {}", path.display()));
        }
        None => {
            fields.insert("instance".into(), json!(text));
        }
    }
    Ok(json_report(argv, Some(digest), result, None, summary))
}

fn cmd_reduce(cmd: ReduceCmd, argv: &[String]) -> Result<Output, CliError> {
    match cmd {
        ReduceCmd::Vc(args) => cmd_reduce_vc(args, argv),
        ReduceCmd::Interval(args) => cmd_reduce_interval(args, argv),
        ReduceCmd::Dominate(args) => cmd_reduce_dominate(args, argv),
    }
}

fn cmd_reduce_vc(args: ReduceVcArgs, argv: &[String]) -> Result<Output, CliError> {
    let (inst, digest) = load_instance(&args.graph)?;
    let kind = inst.kind();
    let Instance::G { graph } = inst else {
        return Err(wrong_kind("reduce vc", &args.graph, "g", kind));
    };
    let red = vc_to_caterpillar_stree(&graph, args.k)?;
    let star = red.graph.star_side();
    let hoods = red.graph.vertex_side_neighborhoods();
    let arrangement_ok = validate_k_star_caterpillar_convex(&star, &hoods, &red.structure, 1)?;
    let cover = min_vertex_cover_brute(&graph)?;
    let steiner = min_steiner_brute(&red.graph, &red.terminals)?;
    if cover.optimum != steiner.optimum {
        return Err(CliError::Internal(format!(
            "gadget broke the correspondence: cover optimum {} vs steiner optimum {}",
            cover.optimum, steiner.optimum
        )));
    }
    let within_budget = cover.optimum <= red.budget;
    let result = json!({
        "kind": "g",
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
        "optima_match": true,
        "within_budget": within_budget,
    });
    let verdict = if within_budget { "yes" } else { "no" };
    let summary = format!(
        "cover budget {} on g(n={}, m={}): {} (optimum {}, gadget agrees)",
        red.budget,
        graph.vertex_count(),
        graph.edge_count(),
        verdict,
        cover.optimum,
    );
    Ok(json_report(argv, Some(digest), result, None, summary))
}

fn cmd_reduce_interval(args: ReduceIntervalArgs, argv: &[String]) -> Result<Output, CliError> {
    let (inst, digest) = load_instance(&args.family)?;
    let kind = inst.kind();
    let Instance::Ivl { model, terminals } = inst else {
        return Err(wrong_kind("reduce interval", &args.family, "ivl", kind));
    };
    let terms = ivl_terminals(args.terminals.as_deref(), &terminals, model.len())?;
    let res = solve_interval_steiner(&model, &terms)?;
    let image_case = terminal_case(&res.reduction.image, &BTreeSet::new(), &terms)
        .expect("terminal sets are nonempty here")
        .name();

    let mut summary = format!(
        "interval steiner on ivl(n={}): size {} set {} via image cbg(m={}, n={})",
        model.len(),
        res.size,
        set_text(&res.steiner_set),
        res.reduction.image.m(),
        res.reduction.image.n(),
    );

    let oracle = if args.oracle {
        let brute = min_steiner_brute(&model.intersection_graph(), &terms)?;
        if brute.optimum != res.size {
            return Err(CliError::Internal(format!(
                "pipeline answered {} but the oracle found {}",
                res.size, brute.optimum
            )));
        }
        summary.push_str(" (oracle agrees)");
        Some(json!({
            "optimum": brute.optimum,
            "witness": brute.witness,
            "explored": brute.explored,
            "matches": true,
        }))
    } else {
        None
    };

    let result = json!({
        "kind": "ivl",
        "n": model.len(),
        "terminals": terms,
        "positions": res.reduction.positions,
        "image": {
            "m": res.reduction.image.m(),
            "n": res.reduction.image.n(),
            "case": image_case,
        },
        "steiner_set": res.steiner_set,
        "size": res.size,
        "image_result": serde_json::to_value(&res.image_result).expect("results serialize"),
    });
    Ok(json_report(argv, Some(digest), result, oracle, summary))
}

fn cmd_reduce_dominate(args: ReduceDominateArgs, argv: &[String]) -> Result<Output, CliError> {
    let (inst, digest) = load_instance(&args.graph)?;
    let kind = inst.kind();
    let Instance::Cbg { graph, .. } = inst else {
        return Err(wrong_kind("reduce dominate", &args.graph, "cbg", kind));
    };
    let dom = dominating_set_via_stree(&graph)?;
    let size = dom.dominating_set.len();

    let mut summary = format!(
        "domination on cbg(m={}, n={}): size {} set {}",
        graph.m(),
        graph.n(),
        size,
        set_text(&dom.dominating_set),
    );

    let oracle = if args.oracle {
        let brute = min_dominating_brute(&graph)?;
        // the sweep union is a valid dominating set, not a minimum one
        let gap = size - brute.optimum;
        summary.push_str(&format!(" (optimum {}, gap {gap})", brute.optimum));
        Some(json!({
            "optimum": brute.optimum,
            "witness": brute.witness,
            "explored": brute.explored,
            "gap": gap,
        }))
    } else {
        None
    };

    let result = json!({
        "kind": "cbg",
        "m": graph.m(),
        "n": graph.n(),
        "dominating_set": dom.dominating_set,
        "size": size,
        "from_all_x": dom.from_all_x,
        "from_all_y": dom.from_all_y,
        "special_case": dom.special_case,
    });
    Ok(json_report(argv, Some(digest), result, oracle, summary))
}

fn cmd_validate(args: ValidateArgs, argv: &[String]) -> Result<Output, CliError> {
    let (inst, digest) = load_instance(&args.graph)?;
    if args.structure.is_some() && !matches!(inst, Instance::Cbg { .. }) {
        return Err(CliError::Usage(format!(
            "--structure checks a cbg's x side; {} holds {}",
            args.graph.display(),
            inst.kind()
        )));
    }
    let (result, summary) = match inst {
        Instance::Cbg { graph, .. } => {
            let rep = graph.validate();
            let mut result = json!({
                "kind": "cbg",
                "m": graph.m(),
                "n": graph.n(),
                "violations": rep.violations,
                "connected": rep.connected,
            });
            let mut ok = rep.ok();
            let mut notes = vec![if rep.connected {
                "connected".to_string()
            } else {
                "disconnected".to_string()
            }];
            if let Some(cat_path) = &args.structure {
                let cat_text = read_file(cat_path)?;
                let cat = parse_caterpillar(&cat_text).map_err(|err| CliError::Parse {
                    path: cat_path.display().to_string(),
                    err,
                })?;
                let x_side: BTreeSet<usize> = (1..=graph.m()).collect();
                let hoods: Vec<BTreeSet<usize>> = graph
                    .intervals()
                    .iter()
                    .map(|iv| (iv.l..=iv.r).collect())
                    .collect();
                let subtrees =
                    validate_k_star_caterpillar_convex(&x_side, &hoods, &cat.structure, cat.k)?;
                result["structure"] = json!({
                    "k": cat.k,
                    "arrangement_ok": true,
                    "neighborhoods_are_subtrees": subtrees,
                });
                ok = ok && subtrees;
                notes.push(format!(
                    "{}-caterpillar arrangement: neighborhoods {} subtrees",
                    cat.k,
                    if subtrees { "are" } else { "are NOT" }
                ));
            }
            result["ok"] = json!(ok);
            let summary = format!(
                "validated cbg(m={}, n={}): {} ({})",
                graph.m(),
                graph.n(),
                if ok { "ok" } else { "NOT ok" },
                notes.join("; "),
            );
            (result, summary)
        }
        Instance::Ivl { model, .. } => {
            let connected = model.intersection_graph().is_connected();
            let result = json!({
                "kind": "ivl",
                "n": model.len(),
                "connected": connected,
                "ok": true,
            });
            let summary = format!(
                "validated ivl(n={}): ok ({})",
                model.len(),
                if connected { "connected" } else { "disconnected" },
            );
            (result, summary)
        }
        Instance::G { graph } => {
            let connected = graph.is_connected();
            let result = json!({
                "kind": "g",
                "vertices": graph.vertex_count(),
                "edges": graph.edge_count(),
                "connected": connected,
                "ok": true,
            });
            let summary = format!(
                "validated g(n={}, m={}): ok ({})",
                graph.vertex_count(),
                graph.edge_count(),
                if connected { "connected" } else { "disconnected" },
            );
            (result, summary)
        }
    };
    Ok(json_report(argv, Some(digest), result, None, summary))
}

fn cmd_traces(argv: &[String]) -> Result<Output, CliError> {
    let outcomes = traces::replay_all();
    let ok = outcomes.iter().all(|o| o.diffs.is_empty());
    let fixtures: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "name": o.name,
                "instance_digest": o.digest,
                "ok": o.diffs.is_empty(),
                "diffs": o.diffs,
            })
        })
        .collect();
    let summary = if ok {
        format!("{} fixtures replayed: all pinned records reproduced", outcomes.len())
    } else {
        let broken: Vec<&str> = outcomes
            .iter()
            .filter(|o| !o.diffs.is_empty())
            .map(|o| o.name)
            .collect();
        format!("record divergence in {}", broken.join(", "))
    };
    Ok(Output::Json {
        report: RunReport {
            command: argv.to_vec(),
            instance_digest: None,
            result: json!({ "fixtures": fixtures, "ok": ok }),
            oracle: None,
            timing_ms: None,
        },
        summary,
        // byte-identical across runs, so no timing field
        timed: false,
        exit: if ok { 0 } else { 5 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    use stree_core::{ConvexBipartiteGraph, Interval};

    fn cbg(m: usize, ivs: &[(usize, usize)]) -> ConvexBipartiteGraph {
        ConvexBipartiteGraph::new(m, ivs.iter().map(|&(l, r)| Interval::new(l, r)).collect())
            .unwrap()
    }

    #[test]
    fn terminal_spec_grammar_round_trips() {
        let none = BTreeSet::new();
        let (xs, ys) = cbg_terminals(Some("all-x"), &none, &none, 4, 3).unwrap();
        assert_eq!(xs, (1..=4).collect());
        assert!(ys.is_empty());
        let (xs, ys) = cbg_terminals(Some("all-y"), &none, &none, 4, 3).unwrap();
        assert!(xs.is_empty());
        assert_eq!(ys, (1..=3).collect());
        let (xs, ys) = cbg_terminals(Some("x=2,1;y=3"), &none, &none, 4, 3).unwrap();
        assert_eq!(xs, BTreeSet::from([1, 2]));
        assert_eq!(ys, BTreeSet::from([3]));
        let (xs, ys) = cbg_terminals(Some("y=2"), &none, &none, 4, 3).unwrap();
        assert!(xs.is_empty());
        assert_eq!(ys, BTreeSet::from([2]));
    }

    #[test]
    fn terminal_spec_flag_overrides_file_lines() {
        let file_x = BTreeSet::from([1]);
        let file_y = BTreeSet::from([2]);
        let (xs, ys) = cbg_terminals(Some("y=1"), &file_x, &file_y, 4, 3).unwrap();
        assert!(xs.is_empty());
        assert_eq!(ys, BTreeSet::from([1]));
        let (xs, ys) = cbg_terminals(None, &file_x, &file_y, 4, 3).unwrap();
        assert_eq!((xs, ys), (file_x, file_y));
    }

    #[test]
    fn terminal_spec_rejects_malformed_forms() {
        let none = BTreeSet::new();
        for spec in ["", "z=1", "x=", "x=a", "x=0", "x=1;x=2", "all", "1,2"] {
            let e = cbg_terminals(Some(spec), &none, &none, 4, 3)
                .expect_err(&format!("spec `{spec}` should fail"));
            assert_eq!(e.exit_code(), 2, "spec `{spec}`");
        }
        let e = cbg_terminals(None, &none, &none, 4, 3).expect_err("no terminals anywhere");
        assert_eq!(e.exit_code(), 3);
        for spec in ["", "v=", "v=0", "x=1", "all-x"] {
            let e = ivl_terminals(Some(spec), &none, 3)
                .expect_err(&format!("spec `{spec}` should fail"));
            assert_eq!(e.exit_code(), 2, "spec `{spec}`");
        }
        assert_eq!(ivl_terminals(Some("all-v"), &none, 3).unwrap(), (1..=3).collect());
    }

    #[test]
    fn table_lookup_sees_through_the_lift() {
        let g = cbg(7, &[(1, 1), (4, 7), (3, 5), (1, 4)]);
        let rx = BTreeSet::from([1, 5]);
        let ry = BTreeSet::from([2]);
        let res = solve_general(&g, &rx, &ry).unwrap();
        let table = find_table(&res.trace).expect("mixed runs lift to the table route");
        assert!(table.window_length > 0);
        let tsv = tsv_table(table);
        assert!(tsv.starts_with("y\tl\tr\tterminal\tf\tcase\tvia\tvia_l\tvia_r\n"));
        assert_eq!(tsv.lines().count(), table.f_entries.len() + 1);
    }

    #[test]
    fn right_walk_has_no_table_to_dump() {
        let g = cbg(3, &[(1, 2), (2, 3)]);
        let res = solve_general(&g, &(1..=3).collect(), &BTreeSet::new()).unwrap();
        assert!(find_table(&res.trace).is_none());
    }
}

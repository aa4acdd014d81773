//! Instance file formats: located parse diagnostics and canonical output.
//!
//! Three line-oriented formats, told apart by their header keyword. `cbg` is
//! a convex bipartite graph (`cbg <m> <n>`, one `y <id> <l> <r>` line per
//! interval, optional `t x <positions…>` and `t y <ids…>` terminal lines).
//! `ivl` is an interval family (`ivl <n>`, `v <id> <left> <right>` lines,
//! optional `t v <ids…>`). `g` is a general graph (`g <n> <m>`, `e <u> <v>`
//! lines). A separate `cat` sidecar describes a caterpillar arrangement
//! (`cat <k>`, one `bb <ids…>` backbone line, `pd <owner> <ids…>` pendant
//! lines). All ids are 1-based, `#` starts a comment, blank lines are
//! skipped, and body lines may come in any order.
//!
//! Serialization is canonical: parsing a file and serializing it back yields
//! the same bytes regardless of the input's spacing, comments, or line
//! order, so the serialized form is what instance digests are taken over.

use std::collections::BTreeSet;
use std::fmt;

use stree_core::{Caterpillar, ConvexBipartiteGraph, GeneralGraph, Interval, IntervalGraphModel};

/// A parse failure pointing at the offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based physical line in the input.
    pub line: usize,
    /// 1-based character column of the token (or of the gap where one was
    /// expected).
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

/// A parsed instance of any of the three formats.
#[derive(Debug, Clone)]
pub enum Instance {
    Cbg {
        graph: ConvexBipartiteGraph,
        terminals_x: BTreeSet<usize>,
        terminals_y: BTreeSet<usize>,
    },
    Ivl {
        model: IntervalGraphModel,
        terminals: BTreeSet<usize>,
    },
    G {
        graph: GeneralGraph,
    },
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Cbg { .. } => "cbg",
            Instance::Ivl { .. } => "ivl",
            Instance::G { .. } => "g",
        }
    }
}

/// A caterpillar sidecar: the arrangement plus its pendant budget `k`.
#[derive(Debug, Clone)]
pub struct CatFile {
    pub k: usize,
    pub structure: Caterpillar<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    col: usize,
    text: &'a str,
}

/// One nonblank line, tokenized with column positions.
struct Line<'a> {
    no: usize,
    tokens: Vec<Token<'a>>,
    /// Column just past the last token, where a missing one is reported.
    end: usize,
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut col = 0usize;
        let mut start = None;
        for ch in body.chars().chain(std::iter::once(' ')) {
            col += 1;
            if ch.is_whitespace() {
                if let Some((c, s)) = start.take() {
                    // columns are char positions, so slice by char count
                    let text: &str = &body[byte_of(body, s)..byte_of(body, col - 1)];
                    tokens.push(Token { col: c, text });
                }
            } else if start.is_none() {
                start = Some((col, col - 1));
            }
        }
        if !tokens.is_empty() {
            let last = tokens.last().expect("nonempty");
            let end = last.col + last.text.chars().count();
            lines.push(Line {
                no: idx + 1,
                tokens,
                end,
            });
        }
    }
    lines
}

fn byte_of(s: &str, chars: usize) -> usize {
    s.char_indices()
        .nth(chars)
        .map(|(b, _)| b)
        .unwrap_or(s.len())
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        col,
        msg: msg.into(),
    }
}

/// Token-by-token reader over one line.
struct Cursor<'a, 'b> {
    line: &'b Line<'a>,
    at: usize,
}

impl<'a, 'b> Cursor<'a, 'b> {
    fn new(line: &'b Line<'a>) -> Self {
        Cursor { line, at: 0 }
    }

    fn take(&mut self, what: &str) -> Result<Token<'a>, ParseError> {
        match self.line.tokens.get(self.at) {
            Some(&t) => {
                self.at += 1;
                Ok(t)
            }
            None => Err(err(
                self.line.no,
                self.line.end,
                format!("expected {what}"),
            )),
        }
    }

    fn number(&mut self, what: &str) -> Result<(usize, Token<'a>), ParseError> {
        let t = self.take(what)?;
        match t.text.parse::<usize>() {
            Ok(v) => Ok((v, t)),
            Err(_) => Err(err(
                self.line.no,
                t.col,
                format!("expected {what}, found `{}`", t.text),
            )),
        }
    }

    fn integer(&mut self, what: &str) -> Result<(i64, Token<'a>), ParseError> {
        let t = self.take(what)?;
        match t.text.parse::<i64>() {
            Ok(v) => Ok((v, t)),
            Err(_) => Err(err(
                self.line.no,
                t.col,
                format!("expected {what}, found `{}`", t.text),
            )),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.line.tokens.get(self.at) {
            Some(t) => Err(err(
                self.line.no,
                t.col,
                format!("unexpected trailing token `{}`", t.text),
            )),
            None => Ok(()),
        }
    }

    /// Remaining tokens as 1-based ids, at least one, each at most `max`.
    fn id_list(&mut self, what: &str, max: usize) -> Result<Vec<usize>, ParseError> {
        let mut ids = Vec::new();
        while self.at < self.line.tokens.len() {
            let (v, t) = self.number(what)?;
            if v == 0 || v > max {
                return Err(err(
                    self.line.no,
                    t.col,
                    format!("{what} {v} out of range 1..={max}"),
                ));
            }
            ids.push(v);
        }
        if ids.is_empty() {
            return Err(err(
                self.line.no,
                self.line.end,
                format!("expected at least one {what}"),
            ));
        }
        Ok(ids)
    }
}

/// Parses an instance in any of the three formats, dispatching on the header.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let lines = tokenize(text);
    let Some(header) = lines.first() else {
        return Err(err(1, 1, "empty input; expected a cbg, ivl, or g header"));
    };
    let kw = header.tokens[0];
    match kw.text {
        "cbg" => parse_cbg(&lines),
        "ivl" => parse_ivl(&lines),
        "g" => parse_g(&lines),
        other => Err(err(
            header.no,
            kw.col,
            format!("unknown instance format `{other}`; expected cbg, ivl, or g"),
        )),
    }
}

fn parse_cbg(lines: &[Line<'_>]) -> Result<Instance, ParseError> {
    let header = &lines[0];
    let mut cur = Cursor::new(header);
    cur.take("the cbg keyword")?;
    let (m, mt) = cur.number("the position count m")?;
    let (n, nt) = cur.number("the interval count n")?;
    cur.finish()?;
    if m == 0 {
        return Err(err(header.no, mt.col, "m must be at least 1"));
    }
    if n == 0 {
        return Err(err(header.no, nt.col, "n must be at least 1"));
    }

    let mut intervals: Vec<Option<Interval>> = vec![None; n];
    let mut terminals_x: Option<BTreeSet<usize>> = None;
    let mut terminals_y: Option<BTreeSet<usize>> = None;
    for line in &lines[1..] {
        let mut cur = Cursor::new(line);
        let kw = cur.take("a y or t line")?;
        match kw.text {
            "y" => {
                let (id, idt) = cur.number("an interval id")?;
                let (l, lt) = cur.number("a left end")?;
                let (r, rt) = cur.number("a right end")?;
                cur.finish()?;
                if id == 0 || id > n {
                    return Err(err(
                        line.no,
                        idt.col,
                        format!("interval id {id} out of range 1..={n}"),
                    ));
                }
                if l == 0 {
                    return Err(err(line.no, lt.col, "left end must be at least 1"));
                }
                if l > r {
                    return Err(err(
                        line.no,
                        lt.col,
                        format!("left end {l} exceeds right end {r}"),
                    ));
                }
                if r > m {
                    return Err(err(
                        line.no,
                        rt.col,
                        format!("right end {r} exceeds m = {m}"),
                    ));
                }
                if intervals[id - 1].is_some() {
                    return Err(err(
                        line.no,
                        idt.col,
                        format!("a second line for interval y{id}"),
                    ));
                }
                intervals[id - 1] = Some(Interval::new(l, r));
            }
            "t" => {
                let side = cur.take("a terminal side (x or y)")?;
                match side.text {
                    "x" => {
                        if terminals_x.is_some() {
                            return Err(err(line.no, side.col, "a second t x line"));
                        }
                        let ids = cur.id_list("terminal position", m)?;
                        terminals_x = Some(ids.into_iter().collect());
                    }
                    "y" => {
                        if terminals_y.is_some() {
                            return Err(err(line.no, side.col, "a second t y line"));
                        }
                        let ids = cur.id_list("terminal interval id", n)?;
                        terminals_y = Some(ids.into_iter().collect());
                    }
                    other => {
                        return Err(err(
                            line.no,
                            side.col,
                            format!("terminal side must be x or y in a cbg file, found `{other}`"),
                        ));
                    }
                }
            }
            other => {
                return Err(err(
                    line.no,
                    kw.col,
                    format!("unexpected keyword `{other}`; a cbg body holds y and t lines"),
                ));
            }
        }
    }
    let missing: Vec<String> = intervals
        .iter()
        .enumerate()
        .filter(|(_, iv)| iv.is_none())
        .map(|(i, _)| format!("y{}", i + 1))
        .collect();
    if !missing.is_empty() {
        return Err(err(
            header.no,
            nt.col,
            format!("header promises {n} intervals but {} are missing", missing.join(", ")),
        ));
    }
    let intervals: Vec<Interval> = intervals.into_iter().map(|iv| iv.expect("checked")).collect();
    let graph = ConvexBipartiteGraph::new(m, intervals).expect("bounds checked per line");
    Ok(Instance::Cbg {
        graph,
        terminals_x: terminals_x.unwrap_or_default(),
        terminals_y: terminals_y.unwrap_or_default(),
    })
}

fn parse_ivl(lines: &[Line<'_>]) -> Result<Instance, ParseError> {
    let header = &lines[0];
    let mut cur = Cursor::new(header);
    cur.take("the ivl keyword")?;
    let (n, nt) = cur.number("the interval count n")?;
    cur.finish()?;
    if n == 0 {
        return Err(err(header.no, nt.col, "n must be at least 1"));
    }

    let mut intervals: Vec<Option<(i64, i64)>> = vec![None; n];
    let mut terminals: Option<BTreeSet<usize>> = None;
    for line in &lines[1..] {
        let mut cur = Cursor::new(line);
        let kw = cur.take("a v or t line")?;
        match kw.text {
            "v" => {
                let (id, idt) = cur.number("an interval id")?;
                let (a, at) = cur.integer("a left endpoint")?;
                let (b, _) = cur.integer("a right endpoint")?;
                cur.finish()?;
                if id == 0 || id > n {
                    return Err(err(
                        line.no,
                        idt.col,
                        format!("interval id {id} out of range 1..={n}"),
                    ));
                }
                if a > b {
                    return Err(err(
                        line.no,
                        at.col,
                        format!("left endpoint {a} exceeds right endpoint {b}"),
                    ));
                }
                if intervals[id - 1].is_some() {
                    return Err(err(
                        line.no,
                        idt.col,
                        format!("a second line for interval v{id}"),
                    ));
                }
                intervals[id - 1] = Some((a, b));
            }
            "t" => {
                let side = cur.take("the terminal side v")?;
                if side.text != "v" {
                    return Err(err(
                        line.no,
                        side.col,
                        format!("terminal side must be v in an ivl file, found `{}`", side.text),
                    ));
                }
                if terminals.is_some() {
                    return Err(err(line.no, side.col, "a second t v line"));
                }
                let ids = cur.id_list("terminal interval id", n)?;
                terminals = Some(ids.into_iter().collect());
            }
            other => {
                return Err(err(
                    line.no,
                    kw.col,
                    format!("unexpected keyword `{other}`; an ivl body holds v and t lines"),
                ));
            }
        }
    }
    let missing: Vec<String> = intervals
        .iter()
        .enumerate()
        .filter(|(_, iv)| iv.is_none())
        .map(|(i, _)| format!("v{}", i + 1))
        .collect();
    if !missing.is_empty() {
        return Err(err(
            header.no,
            nt.col,
            format!("header promises {n} intervals but {} are missing", missing.join(", ")),
        ));
    }
    let intervals: Vec<(i64, i64)> = intervals.into_iter().map(|iv| iv.expect("checked")).collect();
    let model = IntervalGraphModel::new(intervals).expect("endpoints checked per line");
    Ok(Instance::Ivl {
        model,
        terminals: terminals.unwrap_or_default(),
    })
}

fn parse_g(lines: &[Line<'_>]) -> Result<Instance, ParseError> {
    let header = &lines[0];
    let mut cur = Cursor::new(header);
    cur.take("the g keyword")?;
    let (n, nt) = cur.number("the vertex count n")?;
    let (m, mt) = cur.number("the edge count m")?;
    cur.finish()?;
    if n == 0 {
        return Err(err(header.no, nt.col, "n must be at least 1"));
    }

    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(m);
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    for line in &lines[1..] {
        let mut cur = Cursor::new(line);
        let kw = cur.take("an e line")?;
        if kw.text != "e" {
            return Err(err(
                line.no,
                kw.col,
                format!("unexpected keyword `{}`; a g body holds e lines", kw.text),
            ));
        }
        let (u, ut) = cur.number("an endpoint")?;
        let (v, vt) = cur.number("an endpoint")?;
        cur.finish()?;
        if u == 0 || u > n {
            return Err(err(line.no, ut.col, format!("vertex {u} out of range 1..={n}")));
        }
        if v == 0 || v > n {
            return Err(err(line.no, vt.col, format!("vertex {v} out of range 1..={n}")));
        }
        if u == v {
            return Err(err(line.no, ut.col, format!("self-loop at vertex {u}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(err(
                line.no,
                ut.col,
                format!("duplicate edge {{{u},{v}}}"),
            ));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(err(
            header.no,
            mt.col,
            format!("header promises {m} edges but the body holds {}", edges.len()),
        ));
    }
    let graph = GeneralGraph::new(n, edges).expect("endpoints checked per line");
    Ok(Instance::G { graph })
}

/// Parses a caterpillar sidecar. Ids are only checked for syntax here; how
/// they relate to a graph is the validator's business.
pub fn parse_caterpillar(text: &str) -> Result<CatFile, ParseError> {
    let lines = tokenize(text);
    let Some(header) = lines.first() else {
        return Err(err(1, 1, "empty input; expected a cat header"));
    };
    let mut cur = Cursor::new(header);
    let kw = cur.take("the cat keyword")?;
    if kw.text != "cat" {
        return Err(err(
            header.no,
            kw.col,
            format!("expected a cat header, found `{}`", kw.text),
        ));
    }
    // k = 0 is a bare path, so any count is fine here
    let (k, kt) = cur.number("the pendant budget k")?;
    cur.finish()?;

    let mut backbone: Option<Vec<usize>> = None;
    let mut pendants: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for line in &lines[1..] {
        let mut cur = Cursor::new(line);
        let kw = cur.take("a bb or pd line")?;
        match kw.text {
            "bb" => {
                if backbone.is_some() {
                    return Err(err(line.no, kw.col, "a second bb line"));
                }
                backbone = Some(cur.id_list("backbone vertex", usize::MAX)?);
            }
            "pd" => {
                let (owner, ot) = cur.number("a backbone vertex")?;
                if owner == 0 {
                    return Err(err(line.no, ot.col, "vertex ids are 1-based"));
                }
                if pendants.contains_key(&owner) {
                    return Err(err(
                        line.no,
                        ot.col,
                        format!("a second pd line for backbone vertex {owner}"),
                    ));
                }
                let ids = cur.id_list("pendant vertex", usize::MAX)?;
                pendants.insert(owner, ids);
            }
            other => {
                return Err(err(
                    line.no,
                    kw.col,
                    format!("unexpected keyword `{other}`; a cat body holds bb and pd lines"),
                ));
            }
        }
    }
    let Some(backbone) = backbone else {
        return Err(err(header.no, kt.col, "missing the bb backbone line"));
    };
    Ok(CatFile {
        k,
        structure: Caterpillar { backbone, pendants },
    })
}

fn push_ids(out: &mut String, prefix: &str, ids: &BTreeSet<usize>) {
    if ids.is_empty() {
        return;
    }
    out.push_str(prefix);
    for id in ids {
        out.push(' ');
        out.push_str(&id.to_string());
    }
    out.push('\n');
}

/// Canonical text form: body lines in id order, terminals sorted, single
/// spaces, no comments. Parsing the output reproduces the instance.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    match inst {
        Instance::Cbg {
            graph,
            terminals_x,
            terminals_y,
        } => {
            out.push_str(&format!("cbg {} {}\n", graph.m(), graph.n()));
            for (i, iv) in graph.intervals().iter().enumerate() {
                out.push_str(&format!("y {} {} {}\n", i + 1, iv.l, iv.r));
            }
            push_ids(&mut out, "t x", terminals_x);
            push_ids(&mut out, "t y", terminals_y);
        }
        Instance::Ivl { model, terminals } => {
            out.push_str(&format!("ivl {}\n", model.len()));
            for (i, (a, b)) in model.intervals().iter().enumerate() {
                out.push_str(&format!("v {} {} {}\n", i + 1, a, b));
            }
            push_ids(&mut out, "t v", terminals);
        }
        Instance::G { graph } => {
            out.push_str(&format!("g {} {}\n", graph.vertex_count(), graph.edge_count()));
            for (u, v) in graph.edges() {
                out.push_str(&format!("e {u} {v}\n"));
            }
        }
    }
    out
}

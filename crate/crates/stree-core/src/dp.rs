//! Dynamic program for terminal sets that are a proper subset of Y.
//!
//! The instance is narrowed to a window starting at the smallest terminal
//! left end (positions left of it can never help an optimal solution).
//! Intervals are processed in a fixed order (ascending left end, ties by
//! descending right end), and for every interval a cost f is computed: the
//! cheapest way to connect everything up to that interval's span, given that
//! the connection enters through the position just left of the interval.
//! Cell value F[(i,j)] is the minimum f over co-located intervals. The
//! solution is read back bottom-up from the last terminal's cell, then a
//! stabbing pass covers terminals the chain missed.

use std::collections::BTreeSet;

use crate::error::{GraphError, SolveError};
use crate::graph::{ConvexBipartiteGraph, Interval, Vertex};
use crate::solution::{
    CellCase, ChainStep, DpArtifacts, DpCell, FEntry, InstanceClass, PatchStep, PlanShape,
    SteinerResult, Trace,
};

/// Processing order for a family of intervals: ascending left end, ties by
/// descending right end, stable beyond that.
pub fn sigma_order(intervals: &[Interval]) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=intervals.len()).collect();
    order.sort_by(|&a, &b| {
        let ia = intervals[a - 1];
        let ib = intervals[b - 1];
        ia.l.cmp(&ib.l).then(ib.r.cmp(&ia.r)).then(a.cmp(&b))
    });
    order
}

/// An interval carried into the working window, in window coordinates.
#[derive(Debug, Clone, Copy)]
struct WinIv {
    y: usize,
    l: usize,
    r: usize,
    terminal: bool,
}

struct Window {
    /// Original position of window coordinate 1.
    offset: usize,
    /// Number of window positions.
    len: usize,
    /// Windowed intervals in processing order.
    ivs: Vec<WinIv>,
    /// Original indices of intervals entirely left of the window.
    dropped: Vec<usize>,
    /// Index into `ivs` of the last terminal in processing order.
    last_terminal: usize,
}

fn check_terminals(
    graph: &ConvexBipartiteGraph,
    terminals_y: &BTreeSet<usize>,
) -> Result<(), SolveError> {
    if terminals_y.is_empty() {
        return Err(SolveError::EmptyTerminals);
    }
    for &y in terminals_y {
        if y == 0 || y > graph.n() {
            return Err(SolveError::BadTerminal(format!("y{y}")));
        }
    }
    if terminals_y.len() == graph.n() {
        return Err(SolveError::WrongCase(
            "terminals cover the whole y side; use the all-y solver",
        ));
    }
    Ok(())
}

fn build_window(graph: &ConvexBipartiteGraph, terminals_y: &BTreeSet<usize>) -> Window {
    let offset = terminals_y
        .iter()
        .map(|&y| graph.interval(y).l)
        .min()
        .expect("terminal set is nonempty");
    let mut clipped: Vec<Interval> = Vec::new();
    let mut keep: Vec<usize> = Vec::new();
    let mut dropped: Vec<usize> = Vec::new();
    for y in 1..=graph.n() {
        let iv = graph.interval(y);
        if iv.r < offset {
            // no position of this interval survives the cut; it can neither
            // be bought nor connect anything inside the window
            dropped.push(y);
            continue;
        }
        keep.push(y);
        clipped.push(Interval::new(iv.l.max(offset) - offset + 1, iv.r - offset + 1));
    }
    let order = sigma_order(&clipped);
    let ivs: Vec<WinIv> = order
        .iter()
        .map(|&k| {
            let y = keep[k - 1];
            WinIv {
                y,
                l: clipped[k - 1].l,
                r: clipped[k - 1].r,
                terminal: terminals_y.contains(&y),
            }
        })
        .collect();
    let last_terminal = ivs
        .iter()
        .rposition(|iv| iv.terminal)
        .expect("terminals all survive the cut");
    Window {
        offset,
        len: graph.m() - offset + 1,
        ivs,
        dropped,
        last_terminal,
    }
}

/// Candidate shape at the final cell: which kinds of predecessor can carry
/// the connection into the last terminal.
pub fn classify(
    graph: &ConvexBipartiteGraph,
    terminals_y: &BTreeSet<usize>,
) -> Result<InstanceClass, SolveError> {
    check_terminals(graph, terminals_y)?;
    if !graph.is_connected() {
        return Err(SolveError::Graph(GraphError::Disconnected));
    }
    let win = build_window(graph, terminals_y);
    let zk = win.ivs[win.last_terminal];
    if zk.l == 1 {
        return Ok(InstanceClass::WindowStart);
    }
    let (u, v) = (zk.l, zk.r);
    let mut spanning = false;
    let mut inner = false;
    for iv in &win.ivs {
        if iv.l <= u - 1 && u - 1 <= iv.r {
            if iv.r >= v {
                spanning = true;
            } else if iv.r >= u {
                inner = true;
            }
        }
    }
    match (spanning, inner) {
        (true, true) => Ok(InstanceClass::BothKinds),
        (true, false) => Ok(InstanceClass::SpanningOnly),
        (false, true) => Ok(InstanceClass::InnerOnly),
        (false, false) => Err(SolveError::Internal(format!(
            "no interval crosses into position {u} of the window; input disconnected?"
        ))),
    }
}

struct Table {
    entries: Vec<FEntry>,
    /// Cell -> (f_min, winner y, winner terminal, entry index).
    best: std::collections::BTreeMap<(usize, usize), (usize, usize, bool, usize)>,
    computed: usize,
}

fn compute_table(win: &Window) -> Result<Table, SolveError> {
    let mut table = Table {
        entries: Vec::with_capacity(win.ivs.len()),
        best: std::collections::BTreeMap::new(),
        computed: 0,
    };
    for (idx, z) in win.ivs.iter().enumerate() {
        let (i, j) = (z.l, z.r);
        let buy = usize::from(!z.terminal);
        let entry = if i == 1 {
            FEntry {
                y: z.y,
                cell: (i, j),
                terminal: z.terminal,
                f: buy,
                case: CellCase::Base,
                spanning_available: false,
                inner_available: false,
                via: None,
                via_cell: None,
            }
        } else {
            // candidates: intervals covering position i-1, read at their own
            // cells, which the processing order has already finalized
            let mut best_span: Option<(usize, usize, (usize, usize))> = None;
            let mut best_inner: Option<(usize, usize, (usize, usize))> = None;
            for c in &win.ivs {
                if c.l > i - 1 {
                    break; // processing order is ascending in l
                }
                if c.r < i - 1 {
                    continue;
                }
                let cell = (c.l, c.r);
                debug_assert!(cell.0 <= i - 1, "table read must stay below row {i}");
                let &(f_cell, winner, _, _) = table
                    .best
                    .get(&cell)
                    .ok_or_else(|| {
                        SolveError::Internal(format!("cell {cell:?} read before computation"))
                    })?;
                if c.r >= j {
                    // spanning predecessors all offer the same connector room
                    if best_span.is_none_or(|(fb, _, _)| f_cell < fb) {
                        best_span = Some((f_cell, winner, cell));
                    }
                } else if c.r >= i {
                    // on equal value prefer the predecessor reaching farther
                    // right: a wider shared span gives the placement pass
                    // more room and is never worse
                    if best_inner.is_none_or(|(fb, _, cb)| {
                        f_cell < fb || (f_cell == fb && c.r > cb.1)
                    }) {
                        best_inner = Some((f_cell, winner, cell));
                    }
                } else {
                    continue; // ends exactly at i-1: cannot host the connector
                }
            }
            let spanning_available = best_span.is_some();
            let inner_available = best_inner.is_some();
            let (case, f, via) = match (best_span, best_inner) {
                (None, None) => {
                    return Err(SolveError::Internal(format!(
                        "no interval covers position {} of the window; input disconnected?",
                        i - 1
                    )))
                }
                (Some(s), None) => (CellCase::Spanning, 1 + s.0, s),
                (None, Some(d)) => (CellCase::Inner, 1 + buy + d.0, d),
                (Some(s), Some(d)) => {
                    let fs = 1 + s.0;
                    let fd = 1 + buy + d.0;
                    if fs <= fd {
                        (CellCase::Spanning, fs, s)
                    } else {
                        (CellCase::Inner, fd, d)
                    }
                }
            };
            FEntry {
                y: z.y,
                cell: (i, j),
                terminal: z.terminal,
                f,
                case,
                spanning_available,
                inner_available,
                via: Some(via.1),
                via_cell: Some(via.2),
            }
        };
        table.computed += 1;
        let replace = match table.best.get(&(i, j)) {
            None => true,
            Some(&(f_cur, _, winner_terminal, _)) => {
                entry.f < f_cur || (entry.f == f_cur && z.terminal && !winner_terminal)
            }
        };
        if replace {
            table.best.insert((i, j), (entry.f, z.y, z.terminal, idx));
        }
        table.entries.push(entry);
    }
    Ok(table)
}

/// Follows provenance pointers from the last terminal's entry, collecting the
/// connector positions and bought intervals, in original coordinates.
fn walk_chain(
    win: &Window,
    table: &Table,
    start_entry: usize,
) -> Result<(BTreeSet<Vertex>, Vec<ChainStep>), SolveError> {
    let mut set = BTreeSet::new();
    let mut steps = Vec::new();
    let mut idx = start_entry;
    loop {
        let e = &table.entries[idx];
        let (i, _) = e.cell;
        match e.case {
            CellCase::Base => {
                let added_y = (!e.terminal).then_some(e.y);
                if let Some(y) = added_y {
                    set.insert(Vertex::Y(y));
                }
                steps.push(ChainStep {
                    cell: e.cell,
                    evaluated: e.y,
                    case: CellCase::Base,
                    added_x: None,
                    added_y,
                });
                return Ok((set, steps));
            }
            CellCase::Spanning | CellCase::Inner => {
                let x_orig = i + win.offset - 1;
                set.insert(Vertex::X(x_orig));
                let added_y = (e.case == CellCase::Inner && !e.terminal).then_some(e.y);
                if let Some(y) = added_y {
                    set.insert(Vertex::Y(y));
                }
                steps.push(ChainStep {
                    cell: e.cell,
                    evaluated: e.y,
                    case: e.case,
                    added_x: Some(x_orig),
                    added_y,
                });
                let cell = e.via_cell.expect("non-base entries record a predecessor");
                let &(_, _, _, next) = table
                    .best
                    .get(&cell)
                    .ok_or_else(|| SolveError::Internal(format!("dangling pointer to {cell:?}")))?;
                idx = next;
            }
        }
    }
}

/// Stabs the terminals the chain left untouched: repeatedly take the
/// uncovered terminal with the smallest right end and add the rightmost
/// terminal left end inside it.
fn patch_uncovered(
    graph: &ConvexBipartiteGraph,
    terminals_y: &BTreeSet<usize>,
    chosen: &mut BTreeSet<Vertex>,
) -> Vec<PatchStep> {
    let mut stabbed: BTreeSet<usize> = chosen
        .iter()
        .filter_map(|v| match v {
            Vertex::X(p) => Some(*p),
            Vertex::Y(_) => None,
        })
        .collect();
    let covered = |y: usize, stabbed: &BTreeSet<usize>| -> bool {
        let iv = graph.interval(y);
        stabbed.range(iv.l..=iv.r).next().is_some()
    };
    let mut patches = Vec::new();
    loop {
        let next = terminals_y
            .iter()
            .filter(|&&y| !covered(y, &stabbed))
            .min_by_key(|&&y| {
                let iv = graph.interval(y);
                (iv.r, iv.l, y)
            });
        let Some(&z) = next else { break };
        let iv = graph.interval(z);
        let stab = terminals_y
            .iter()
            .map(|&y| graph.interval(y).l)
            .filter(|&l| iv.contains(l))
            .max()
            .expect("the uncovered terminal's own left end qualifies");
        debug_assert!(!stabbed.contains(&stab), "a present stab would cover z");
        stabbed.insert(stab);
        chosen.insert(Vertex::X(stab));
        let covered_now: Vec<usize> = terminals_y
            .iter()
            .copied()
            .filter(|&y| graph.interval(y).contains(stab))
            .collect();
        patches.push(PatchStep {
            terminal: z,
            stabbed: stab,
            covered: covered_now,
        });
    }
    patches
}

/// Point-update, prefix-sum counter over window positions.
struct Fenwick(Vec<u32>);

impl Fenwick {
    fn new(len: usize) -> Self {
        Fenwick(vec![0; len + 1])
    }

    fn add(&mut self, mut i: usize) {
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    fn prefix(&self, mut i: usize) -> u32 {
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i &= i - 1;
        }
        s
    }

    fn range(&self, a: usize, b: usize) -> u32 {
        self.prefix(b) - self.prefix(a - 1)
    }
}

/// Re-placed chain connectors plus any stabs still needed, window coordinates.
struct Placement {
    /// One position per chain step; `None` for the base step.
    connectors: Vec<Option<usize>>,
    /// Stab positions beyond the connectors, ascending.
    extras: Vec<usize>,
}

/// Chooses connector positions and extra stabs jointly so the whole plan uses
/// as few vertices as possible.
///
/// The chain fixes which intervals are bought, but each connector may sit
/// anywhere in the span shared by the two intervals it joins, and each
/// off-chain terminal needs some chosen position inside its interval (clamped
/// to the chain's reach so the stab stays attached). Selecting the positions
/// is an interval covering problem: every terminal demand wants one point in
/// its range, and the connector spans need pairwise distinct points, which by
/// Hall's condition is equivalent to every window [a, b] holding at least as
/// many points as it contains whole spans. All constraints have contiguous
/// ranges, so processing them by right endpoint and filling deficits at the
/// rightmost free positions is exact. Points are then handed back to the
/// spans (earliest deadline, smallest fitting point); whatever remains is an
/// extra stab. Returns `None` when no plan exists, which a well-formed chain
/// never triggers.
fn place_connectors(win: &Window, chain: &[ChainStep]) -> Option<Placement> {
    // shared span of each non-base step and its predecessor below it
    let mut spans: Vec<(usize, usize, usize)> = Vec::new(); // (left, deadline, step)
    for (s, st) in chain.iter().enumerate() {
        if st.case == CellCase::Base {
            break; // the walk always ends at the base entry
        }
        let (i, j) = st.cell;
        let pred = chain.get(s + 1)?.cell;
        spans.push((i, j.min(pred.1), s));
    }
    let chain_max_r = chain.iter().map(|st| st.cell.1).max()?;
    let on_chain: BTreeSet<usize> = chain.iter().map(|st| st.evaluated).collect();

    // coverage demands from terminals the chain does not evaluate
    let mut reqs: Vec<(usize, usize, u32)> = Vec::new(); // (right, left, count)
    for iv in &win.ivs {
        if iv.terminal && !on_chain.contains(&iv.y) {
            reqs.push((iv.r.min(chain_max_r), iv.l, 1));
        }
    }

    // Hall windows over the spans: for every (span left, span deadline) pair,
    // the window must hold as many points as the spans it fully contains
    let mut lefts: Vec<usize> = spans.iter().map(|&(a, _, _)| a).collect();
    lefts.sort_unstable();
    let mut by_deadline = spans.clone();
    by_deadline.sort_unstable_by_key(|&(_, w, _)| w);
    let mut deadlines: Vec<usize> = by_deadline.iter().map(|&(_, w, _)| w).collect();
    deadlines.dedup();
    let mut seen = Fenwick::new(win.len);
    let mut feed = by_deadline.iter().peekable();
    for &b in &deadlines {
        while let Some(&&(a, w, _)) = feed.peek() {
            if w > b {
                break;
            }
            seen.add(a);
            feed.next();
        }
        for &a in lefts.iter().rev() {
            if a > b {
                continue;
            }
            let g = seen.range(a, b);
            if g > 0 {
                reqs.push((b, a, g));
            }
        }
    }

    reqs.sort_unstable_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));

    let mut occupied: BTreeSet<usize> = BTreeSet::new();
    let mut counts = Fenwick::new(win.len);
    for &(b, a, g) in &reqs {
        let mut need = g.saturating_sub(counts.range(a, b));
        let mut q = b;
        while need > 0 {
            if !occupied.contains(&q) {
                occupied.insert(q);
                counts.add(q);
                need -= 1;
            }
            if q == a {
                break;
            }
            q -= 1;
        }
        if need > 0 {
            return None; // demanded more points than the window holds
        }
    }

    // hand points back to the spans: earliest deadline takes the smallest fit
    let mut order: Vec<usize> = (0..spans.len()).collect();
    order.sort_unstable_by_key(|&t| spans[t].1);
    let mut avail = occupied.clone();
    let mut connectors = vec![None; chain.len()];
    for t in order {
        let (a, w, s) = spans[t];
        let &q = avail.range(a..=w).next()?;
        avail.remove(&q);
        connectors[s] = Some(q);
    }
    let extras: Vec<usize> = avail.into_iter().collect();
    Some(Placement { connectors, extras })
}

/// Rewrites the chain and patches around a re-placed connector plan.
fn apply_placement(
    graph: &ConvexBipartiteGraph,
    win: &Window,
    terminals_y: &BTreeSet<usize>,
    chain: &[ChainStep],
    placement: &Placement,
) -> Option<(BTreeSet<Vertex>, Vec<ChainStep>, Vec<PatchStep>)> {
    let mut chosen = BTreeSet::new();
    let mut steps = Vec::with_capacity(chain.len());
    for (s, st) in chain.iter().enumerate() {
        let added_x = match st.case {
            CellCase::Base => None,
            CellCase::Spanning | CellCase::Inner => {
                Some(placement.connectors[s]? + win.offset - 1)
            }
        };
        if let Some(p) = added_x {
            chosen.insert(Vertex::X(p));
        }
        if let Some(y) = st.added_y {
            chosen.insert(Vertex::Y(y));
        }
        steps.push(ChainStep {
            added_x,
            ..st.clone()
        });
    }
    let mut stabbed: BTreeSet<usize> = chosen
        .iter()
        .filter_map(|v| match v {
            Vertex::X(p) => Some(*p),
            Vertex::Y(_) => None,
        })
        .collect();
    let mut patches = Vec::new();
    for &q in &placement.extras {
        let stab = q + win.offset - 1;
        // a minimal plan never carries a stab that covers nothing new
        let demanding = terminals_y
            .iter()
            .copied()
            .filter(|&y| {
                let iv = graph.interval(y);
                iv.contains(stab) && stabbed.range(iv.l..=iv.r).next().is_none()
            })
            .min_by_key(|&y| {
                let iv = graph.interval(y);
                (iv.r, iv.l, y)
            })?;
        stabbed.insert(stab);
        chosen.insert(Vertex::X(stab));
        let covered: Vec<usize> = terminals_y
            .iter()
            .copied()
            .filter(|&y| graph.interval(y).contains(stab))
            .collect();
        patches.push(PatchStep {
            terminal: demanding,
            stabbed: stab,
            covered,
        });
    }
    Some((chosen, steps, patches))
}

/// Interval joining two consecutive stabs of a synthesized plan, by index
/// into the window's processing order.
#[derive(Debug, Clone, Copy)]
enum SynthLink {
    /// A terminal contains both stabs; linking through it is free.
    Terminal(usize),
    /// A bought interval contains both stabs. `paid` marks the leftmost edge
    /// using it, where its cost is charged.
    Bought { iv: usize, paid: bool },
}

/// Whole-window plan: stab positions ascending plus the interval carrying
/// each consecutive pair. Cost counts one per stab and one per bought.
struct SynthPlan {
    stabs: Vec<usize>,
    /// `links[i]` joins `stabs[i]` and `stabs[i + 1]`.
    links: Vec<SynthLink>,
    cost: usize,
}

/// Search state: rightmost stab so far plus the one bought interval still
/// reaching past it. Carrying more than one bought is pointless: of two live
/// boughts the one reaching farther can serve every later link of the other.
struct SynthState {
    p: usize,
    /// Right end of the carried bought, 0 when none is alive.
    reach: usize,
    reach_iv: usize,
    cost: usize,
    parent: Option<usize>,
    link: Option<SynthLink>,
}

/// Pareto insert: a state is kept only if no sibling at the same position has
/// both cheaper-or-equal cost and farther-or-equal carried reach.
fn synth_push(
    arena: &mut Vec<SynthState>,
    slot: &mut Vec<(usize, usize)>,
    rec: SynthState,
) -> bool {
    if slot
        .iter()
        .any(|&(r, i)| arena[i].cost <= rec.cost && r >= rec.reach)
    {
        return false;
    }
    slot.retain(|&(r, i)| !(rec.cost <= arena[i].cost && rec.reach >= r));
    slot.push((rec.reach, arena.len()));
    arena.push(rec);
    true
}

/// Exact search over whole-window plans, used when the chain-plus-patches
/// plan might overshoot. A plan is a set of stab positions, ascending, such
/// that every terminal contains a stab and every consecutive pair shares an
/// interval: free through a terminal, `buy_cost` through a bought interval.
/// Stabs cost one each, so callers weighing buys above everything pass a
/// `buy_cost` exceeding the window length, making the stab count a pure
/// tie-break that keeps every stab in the winning plan necessary.
///
/// The state space is (position, carried bought), expanded left to right.
/// Stabs are restricted to interval right ends: any other stab can shift
/// right without losing coverage or links until it hits one. A jump from p
/// to q is legal only when no terminal lies strictly between them, which
/// keeps every terminal covered without tracking them individually. Buying
/// always takes the farthest-reaching interval available, and never happens
/// while a free link suffices, because a buy can be deferred to the first
/// edge that needs it at no loss. Returns the cheapest plan whose final stab
/// reaches the last terminal's row, if one costs strictly less than `ub`.
fn synthesize(win: &Window, ub: usize, buy_cost: usize) -> Option<SynthPlan> {
    if ub <= 1 {
        return None;
    }
    let w = win.len;
    let u = win.ivs[win.last_terminal].l;

    // per-position link suppliers and the no-skipped-terminal guard
    let sentinel = (0usize, usize::MAX);
    let mut best_free = vec![sentinel; w + 1];
    let mut best_buy = vec![sentinel; w + 1];
    let mut gap_bound = vec![usize::MAX; w + 1];
    let mut idx = 0;
    let mut free = sentinel;
    let mut buy = sentinel;
    for p in 1..=w {
        while idx < win.ivs.len() && win.ivs[idx].l <= p {
            let iv = &win.ivs[idx];
            let slot = if iv.terminal { &mut free } else { &mut buy };
            if iv.r > slot.0 {
                *slot = (iv.r, idx);
            }
            idx += 1;
        }
        best_free[p] = free;
        best_buy[p] = buy;
    }
    let mut idx = win.ivs.len();
    let mut min_r = usize::MAX;
    for p in (0..=w).rev() {
        while idx > 0 && win.ivs[idx - 1].l > p {
            idx -= 1;
            let iv = &win.ivs[idx];
            if iv.terminal {
                min_r = min_r.min(iv.r);
            }
        }
        gap_bound[p] = min_r;
    }

    let mut endpoints: Vec<usize> = win.ivs.iter().map(|iv| iv.r).collect();
    endpoints.sort_unstable();
    endpoints.dedup();

    let mut arena: Vec<SynthState> = Vec::new();
    let mut frontier: Vec<Vec<(usize, usize)>> = vec![Vec::new(); endpoints.len()];
    let mut bound = ub;
    let mut best: Option<usize> = None;

    // first stab: left of it must be no whole terminal
    for (ei, &q) in endpoints.iter().enumerate() {
        if q > gap_bound[0] {
            break;
        }
        let rec = SynthState {
            p: q,
            reach: 0,
            reach_iv: usize::MAX,
            cost: 1,
            parent: None,
            link: None,
        };
        if synth_push(&mut arena, &mut frontier[ei], rec) && q >= u && 1 < bound {
            bound = 1;
            best = Some(arena.len() - 1);
        }
    }

    for ei in 0..endpoints.len() {
        for k in 0..frontier[ei].len() {
            let (_, si) = frontier[ei][k];
            let (p, reach, reach_iv, cost) = {
                let s = &arena[si];
                (s.p, s.reach, s.reach_iv, s.cost)
            };
            if cost + 1 >= bound {
                continue;
            }
            let gb = gap_bound[p];
            let free = best_free[p];
            let free_hi = free.0.max(reach).min(gb);
            let buy = best_buy[p];
            let buy_hi = buy.0.min(gb);
            let lo = endpoints.partition_point(|&e| e <= p);
            for qi in lo..endpoints.len() {
                let q = endpoints[qi];
                if q > free_hi.max(buy_hi) {
                    break;
                }
                let (link, edge, nr, nri) = if q <= free_hi {
                    let link = if free.0 >= q {
                        SynthLink::Terminal(free.1)
                    } else {
                        SynthLink::Bought {
                            iv: reach_iv,
                            paid: false,
                        }
                    };
                    let (nr, nri) = if reach >= q {
                        (reach, reach_iv)
                    } else {
                        (0, usize::MAX)
                    };
                    (link, 1, nr, nri)
                } else {
                    // q outlies every free link; buy the farthest interval
                    let link = SynthLink::Bought {
                        iv: buy.1,
                        paid: true,
                    };
                    (link, 1 + buy_cost, buy.0, buy.1)
                };
                if cost + edge >= bound {
                    continue;
                }
                let rec = SynthState {
                    p: q,
                    reach: nr,
                    reach_iv: nri,
                    cost: cost + edge,
                    parent: Some(si),
                    link: Some(link),
                };
                if synth_push(&mut arena, &mut frontier[qi], rec) && q >= u {
                    bound = cost + edge;
                    best = Some(arena.len() - 1);
                }
            }
        }
    }

    let goal = best?;
    let mut stabs = Vec::new();
    let mut links = Vec::new();
    let mut cur = Some(goal);
    while let Some(i) = cur {
        let s = &arena[i];
        stabs.push(s.p);
        if let Some(l) = s.link {
            links.push(l);
        }
        cur = s.parent;
    }
    stabs.reverse();
    links.reverse();
    debug_assert!(stabs.windows(2).all(|ab| ab[0] < ab[1]));
    Some(SynthPlan {
        stabs,
        links,
        cost: arena[goal].cost,
    })
}

/// Decomposes a synthesized plan into walk-shaped artifacts. The chain
/// follows the links downward from the stab inside the last terminal's row;
/// the first link touching the window start closes it as the base step, and
/// every stab left over becomes a patch row charged to the terminal that
/// demanded it. Returns `None` on any shape the decomposition cannot express
/// faithfully, which a minimal plan is argued never to take; the caller then
/// keeps the plan it already has.
fn synth_artifacts(
    graph: &ConvexBipartiteGraph,
    win: &Window,
    terminals_y: &BTreeSet<usize>,
    plan: &SynthPlan,
) -> Option<(BTreeSet<Vertex>, Vec<ChainStep>, Vec<PatchStep>)> {
    // Consecutive links through one bought interval spend a single buy, so
    // they collapse to one link before the walk-shaped read-off; the stabs
    // between them keep only their coverage duties and patch instead.
    let mut stabs: Vec<usize> = Vec::with_capacity(plan.stabs.len());
    let mut links: Vec<SynthLink> = Vec::with_capacity(plan.links.len());
    let mut collapsed: Vec<usize> = Vec::new();
    stabs.push(plan.stabs[0]);
    for (j, &link) in plan.links.iter().enumerate() {
        let top = plan.stabs[j + 1];
        if let (Some(SynthLink::Bought { iv: prev, paid }), SynthLink::Bought { iv, paid: p }) =
            (links.last_mut(), link)
        {
            if *prev == iv {
                *paid |= p;
                collapsed.push(stabs.pop().expect("a link always follows a stab"));
                stabs.push(top);
                continue;
            }
        }
        links.push(link);
        stabs.push(top);
    }

    let zk = win.ivs[win.last_terminal];
    let (u, v) = (zk.l, zk.r);
    let a = stabs.iter().rposition(|&p| (u..=v).contains(&p))?;
    // a bought link right of the spine would have no chain step to carry it
    if links[a..]
        .iter()
        .any(|l| matches!(l, SynthLink::Bought { .. }))
    {
        return None;
    }

    // intervals on the path from the last terminal down, paired with their
    // connector stabs; cut at the first one touching the window start
    struct Piece {
        iv: usize,
        bought: bool,
        paid: bool,
        connector: usize,
    }
    let mut pieces: Vec<Piece> = vec![Piece {
        iv: win.last_terminal,
        bought: false,
        paid: false,
        connector: stabs[a],
    }];
    let mut spine_lo = 0;
    let mut closed = false;
    let mut cut_iv = usize::MAX;
    for j in (0..a).rev() {
        let (iv, bought, paid) = match links[j] {
            SynthLink::Terminal(iv) => (iv, false, false),
            SynthLink::Bought { iv, paid } => (iv, true, paid),
        };
        if win.ivs[iv].l == 1 {
            // base row reached; stabs below it patch, they do not connect
            pieces.push(Piece {
                iv,
                bought,
                paid,
                connector: 0,
            });
            spine_lo = j + 1;
            closed = true;
            cut_iv = iv;
            break;
        }
        pieces.push(Piece {
            iv,
            bought,
            paid,
            connector: stabs[j],
        });
    }
    if closed {
        // A bought link below the base would be unreachable from the chain,
        // and a minimal plan has no use for one: the base spans its stabs.
        // The base row itself is the exception, since its buy rides on the
        // base step whether it was paid above or below the cut.
        if links[..spine_lo - 1]
            .iter()
            .any(|l| matches!(l, SynthLink::Bought { iv, .. } if *iv != cut_iv))
        {
            return None;
        }
    } else {
        let base = win
            .ivs
            .iter()
            .position(|iv| iv.terminal && iv.l == 1)
            .expect("the window starts at a terminal left end");
        pieces.push(Piece {
            iv: base,
            bought: false,
            paid: false,
            connector: 0,
        });
    }

    let mut chosen: BTreeSet<Vertex> = plan
        .stabs
        .iter()
        .map(|&p| Vertex::X(p + win.offset - 1))
        .collect();
    let mut chain = Vec::with_capacity(pieces.len());
    for (k, piece) in pieces.iter().enumerate() {
        let iv = win.ivs[piece.iv];
        let last = k + 1 == pieces.len();
        let case = if last {
            CellCase::Base
        } else {
            let pred = win.ivs[pieces[k + 1].iv];
            if pred.r >= iv.r {
                CellCase::Spanning
            } else {
                CellCase::Inner
            }
        };
        if piece.bought && case == CellCase::Spanning {
            // the predecessor spans this link's whole row, so the buy was
            // wasted; a minimal plan cannot contain this shape
            return None;
        }
        let added_y = (piece.bought && (piece.paid || case == CellCase::Base)).then(|| {
            chosen.insert(Vertex::Y(iv.y));
            iv.y
        });
        chain.push(ChainStep {
            cell: (iv.l, iv.r),
            evaluated: iv.y,
            case,
            added_x: (!last).then_some(piece.connector + win.offset - 1),
            added_y,
        });
    }

    let mut stabbed: BTreeSet<usize> = chain
        .iter()
        .filter_map(|st| st.added_x)
        .collect();
    let mut patches = Vec::new();
    let mut extras: Vec<usize> = stabs[..spine_lo]
        .iter()
        .chain(&stabs[a + 1..])
        .chain(&collapsed)
        .copied()
        .collect();
    extras.sort_unstable();
    for &q in &extras {
        let stab = q + win.offset - 1;
        // a minimal plan never carries a stab that covers nothing new
        let demanding = terminals_y
            .iter()
            .copied()
            .filter(|&y| {
                let iv = graph.interval(y);
                iv.contains(stab) && stabbed.range(iv.l..=iv.r).next().is_none()
            })
            .min_by_key(|&y| {
                let iv = graph.interval(y);
                (iv.r, iv.l, y)
            })?;
        stabbed.insert(stab);
        let covered: Vec<usize> = terminals_y
            .iter()
            .copied()
            .filter(|&y| graph.interval(y).contains(stab))
            .collect();
        patches.push(PatchStep {
            terminal: demanding,
            stabbed: stab,
            covered,
        });
    }
    Some((chosen, chain, patches))
}

/// What the emitted vertex set should minimize. The table, its value, and
/// the trace semantics are identical either way; only the plan selection at
/// the end differs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EmitObjective {
    /// Count every chosen vertex, connector and interval alike.
    FewestVertices,
    /// Count only the bought intervals. Callers that project the solution
    /// onto the interval side get connectors for free, and counting them
    /// would steer the plan toward buying intervals it does not need.
    FewestBuys,
}

/// Minimum Steiner set when the terminals are a proper, nonempty subset of Y.
pub fn solve_subset_y(
    graph: &ConvexBipartiteGraph,
    terminals_y: &BTreeSet<usize>,
) -> Result<SteinerResult, SolveError> {
    solve_subset_y_with(graph, terminals_y, EmitObjective::FewestVertices)
}

/// [`solve_subset_y`] variant that minimizes bought intervals rather than
/// total vertices, for callers that discard the connectors afterwards.
pub(crate) fn solve_subset_y_fewest_buys(
    graph: &ConvexBipartiteGraph,
    terminals_y: &BTreeSet<usize>,
) -> Result<SteinerResult, SolveError> {
    solve_subset_y_with(graph, terminals_y, EmitObjective::FewestBuys)
}

fn solve_subset_y_with(
    graph: &ConvexBipartiteGraph,
    terminals_y: &BTreeSet<usize>,
    objective: EmitObjective,
) -> Result<SteinerResult, SolveError> {
    check_terminals(graph, terminals_y)?;
    if !graph.is_connected() {
        return Err(SolveError::Graph(GraphError::Disconnected));
    }
    let terminals: BTreeSet<Vertex> = terminals_y.iter().map(|&y| Vertex::Y(y)).collect();
    if terminals_y.len() == 1 {
        return SteinerResult::checked(
            graph,
            &terminals,
            BTreeSet::new(),
            Trace::Trivial {
                reason: "single terminal".to_string(),
            },
        );
    }
    let win = build_window(graph, terminals_y);
    let zk = win.ivs[win.last_terminal];
    let sigma: Vec<usize> = win.ivs.iter().map(|iv| iv.y).collect();

    if zk.l == 1 {
        // every terminal touches the window start; one stab connects them all
        let chosen = BTreeSet::from([Vertex::X(win.offset)]);
        let artifacts = DpArtifacts {
            window_offset: win.offset,
            window_length: win.len,
            sigma,
            dropped: win.dropped.clone(),
            instance_class: InstanceClass::WindowStart,
            f_entries: Vec::new(),
            cells: Vec::new(),
            final_cell: (1, zk.r),
            answer: 1,
            chain: Vec::new(),
            patches: Vec::new(),
            plan: PlanShape::Canonical,
            computed_entries: 0,
        };
        return SteinerResult::checked(graph, &terminals, chosen, Trace::Dp(artifacts));
    }

    let table = compute_table(&win)?;
    let zk_entry = &table.entries[win.last_terminal];
    let instance_class = match (zk_entry.spanning_available, zk_entry.inner_available) {
        (true, true) => InstanceClass::BothKinds,
        (true, false) => InstanceClass::SpanningOnly,
        (false, true) => InstanceClass::InnerOnly,
        (false, false) => {
            return Err(SolveError::Internal(
                "last terminal entry has no predecessor".to_string(),
            ))
        }
    };
    let final_cell = zk_entry.cell;
    let answer = table
        .best
        .get(&final_cell)
        .map(|&(f, _, _, _)| f)
        .expect("final cell was computed");
    debug_assert_eq!(
        answer, zk_entry.f,
        "a terminal always attains its cell minimum"
    );

    let (mut chosen, chain) = walk_chain(&win, &table, win.last_terminal)?;
    debug_assert_eq!(chosen.len(), answer, "chain size equals the table value");
    let patches = patch_uncovered(graph, terminals_y, &mut chosen);
    let mut plan = PlanShape::Canonical;

    // The walk pins every connector at its cell's left end. Any position in
    // the span shared by the joined intervals works just as well, and moving
    // a connector can cover a terminal the pinned choice misses. Re-place the
    // connectors jointly with the stabbing duties and adopt the result only
    // when it is strictly smaller, so ties keep the canonical plan.
    let (mut chosen, mut chain, mut patches) = match place_connectors(&win, &chain)
        .filter(|p| p.extras.len() < patches.len())
        .and_then(|p| apply_placement(graph, &win, terminals_y, &chain, &p))
    {
        Some(refit) => {
            plan = PlanShape::Refitted;
            refit
        }
        None => (chosen, chain, patches),
    };

    // Both plans above keep the table's chain, which can overshoot when a
    // tied table route buys an interval the best plan does without. The
    // exact whole-window search re-derives a plan from scratch, and it is
    // adopted only when strictly better under the requested objective, so
    // ties keep the plan already in hand.
    match objective {
        EmitObjective::FewestVertices => {
            // A patch-free plan is already optimal here, since the table
            // value alone is a lower bound on any solution.
            if !patches.is_empty() {
                if let Some(exact) = synthesize(&win, chosen.len(), 1) {
                    if let Some(better) = synth_artifacts(graph, &win, terminals_y, &exact) {
                        debug_assert_eq!(
                            better.0.len(),
                            exact.cost,
                            "plan cost equals its set size"
                        );
                        (chosen, chain, patches) = better;
                        plan = PlanShape::Synthesized;
                    }
                }
            }
        }
        EmitObjective::FewestBuys => {
            // A vertex-minimal plan need not be buy-minimal even when patch
            // free, so the search runs whenever there is a buy left to shed.
            // Weighting a buy above the whole window makes the connector
            // count a pure tie-break, which keeps every connector in the
            // winning plan necessary.
            let buys = chosen
                .iter()
                .filter(|v| matches!(v, Vertex::Y(_)))
                .count();
            let buy_cost = win.len + 1;
            if buys > 0 {
                if let Some(exact) = synthesize(&win, buys * buy_cost + 1, buy_cost) {
                    if let Some(better) = synth_artifacts(graph, &win, terminals_y, &exact) {
                        let got = better
                            .0
                            .iter()
                            .filter(|v| matches!(v, Vertex::Y(_)))
                            .count();
                        debug_assert_eq!(
                            got * buy_cost + (better.0.len() - got),
                            exact.cost,
                            "plan cost weighs its buys"
                        );
                        debug_assert!(got < buys, "adopted plan sheds a buy");
                        (chosen, chain, patches) = better;
                        plan = PlanShape::Synthesized;
                    }
                }
            }
        }
    }

    let cells: Vec<DpCell> = table
        .best
        .iter()
        .map(|(&(i, j), &(f_min, winner, _, _))| DpCell {
            i,
            j,
            f_min,
            winner,
        })
        .collect();
    let computed = table.computed;
    let artifacts = DpArtifacts {
        window_offset: win.offset,
        window_length: win.len,
        sigma,
        dropped: win.dropped.clone(),
        instance_class,
        f_entries: table.entries,
        cells,
        final_cell,
        answer,
        chain,
        patches,
        plan,
        computed_entries: computed,
    };
    SteinerResult::checked(graph, &terminals, chosen, Trace::Dp(artifacts))
}

//! Seeded random instance generators for tests and experiments.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GenError;
use crate::graph::{ConvexBipartiteGraph, GeneralGraph, Interval, IntervalGraphModel};
use crate::solution::TerminalCase;

/// Parameters for the seeded generators. `density` scales interval lengths
/// relative to the position range and must lie in (0, 1].
#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub density: f64,
    /// Repair the instance until it is connected.
    pub connect: bool,
}

fn check_config(cfg: &GenConfig) -> Result<(), GenError> {
    if cfg.m == 0 {
        return Err(GenError::BadConfig("m must be at least 1"));
    }
    if !(cfg.density > 0.0 && cfg.density <= 1.0) {
        return Err(GenError::BadConfig("density must lie in (0, 1]"));
    }
    Ok(())
}

/// Random convex bipartite graph with `m` positions and `n` intervals whose
/// lengths are drawn up to `2 * density * m`. With `connect`, intervals are
/// widened toward uncrossed cuts until the graph is connected.
pub fn gen_convex_bipartite(cfg: &GenConfig) -> Result<ConvexBipartiteGraph, GenError> {
    check_config(cfg)?;
    if cfg.connect && cfg.m >= 2 && cfg.n == 0 {
        return Err(GenError::InfeasibleCase(
            "cannot connect two or more positions without intervals",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let max_len = ((2.0 * cfg.density * cfg.m as f64).round() as usize).clamp(1, cfg.m);
    let mut intervals: Vec<Interval> = (0..cfg.n)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            let l = rng.gen_range(1..=cfg.m - len + 1);
            Interval::new(l, l + len - 1)
        })
        .collect();

    if cfg.connect {
        // widen an interval nearest to the leftmost uncrossed cut, one step
        // at a time; widening never uncrosses an earlier cut
        while let Some(p) = leftmost_uncrossed_cut(cfg.m, &intervals) {
            let dist = |iv: &Interval| {
                if iv.r <= p {
                    p + 1 - iv.r
                } else {
                    iv.l - p
                }
            };
            let best = intervals.iter().map(dist).min().expect("n >= 1 here");
            let nearest: Vec<usize> = (0..intervals.len())
                .filter(|&i| dist(&intervals[i]) == best)
                .collect();
            let pick = nearest[rng.gen_range(0..nearest.len())];
            let iv = &mut intervals[pick];
            if iv.r <= p {
                iv.r += 1;
            } else {
                iv.l -= 1;
            }
        }
    }
    Ok(ConvexBipartiteGraph::new(cfg.m, intervals).expect("generated intervals are in bounds"))
}

/// The smallest p such that no interval has `l <= p` and `r >= p + 1`, i.e.
/// positions p and p+1 are in different components. `None` when connected.
fn leftmost_uncrossed_cut(m: usize, intervals: &[Interval]) -> Option<usize> {
    (1..m).find(|&p| !intervals.iter().any(|iv| iv.l <= p && iv.r >= p + 1))
}

/// Random family of `n` integer intervals. With `connect`, gaps between the
/// sorted intervals are bridged by stretching a widest-reaching interval.
pub fn gen_interval_family(cfg: &GenConfig) -> Result<IntervalGraphModel, GenError> {
    check_config(cfg)?;
    if cfg.n == 0 {
        return Err(GenError::BadConfig(
            "an interval family needs at least one interval",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let span = (3 * cfg.n) as i64;
    let max_len = ((cfg.density * span as f64).round() as i64).max(1);
    let mut intervals: Vec<(i64, i64)> = (0..cfg.n)
        .map(|_| {
            let l = rng.gen_range(0..=span);
            let r = l + rng.gen_range(0..=max_len);
            (l, r)
        })
        .collect();

    if cfg.connect {
        // sweep left to right; whenever the next interval starts past the
        // frontier, stretch the frontier interval to touch it
        loop {
            let mut order: Vec<usize> = (0..intervals.len()).collect();
            order.sort_by_key(|&i| intervals[i]);
            let mut frontier = order[0];
            let mut bridged = false;
            for &i in &order[1..] {
                if intervals[i].0 > intervals[frontier].1 {
                    intervals[frontier].1 = intervals[i].0;
                    bridged = true;
                    break;
                }
                if intervals[i].1 > intervals[frontier].1 {
                    frontier = i;
                }
            }
            if !bridged {
                break;
            }
        }
    }
    IntervalGraphModel::new(intervals).map_err(|_| GenError::BadConfig("generated family invalid"))
}

/// Draws a terminal set of the requested shape. Returns x positions and y
/// indices; cases that need more structure than the graph has are rejected.
pub fn gen_terminals<R: Rng>(
    m: usize,
    n: usize,
    case: TerminalCase,
    rng: &mut R,
) -> Result<(BTreeSet<usize>, BTreeSet<usize>), GenError> {
    let pick = |rng: &mut R, total: usize, count: usize| -> BTreeSet<usize> {
        sample(rng, total, count).into_iter().map(|i| i + 1).collect()
    };
    match case {
        TerminalCase::AllX => Ok(((1..=m).collect(), BTreeSet::new())),
        TerminalCase::SubsetX => {
            if m < 2 {
                return Err(GenError::InfeasibleCase(
                    "a proper position subset needs m >= 2",
                ));
            }
            let count = rng.gen_range(1..=m - 1);
            Ok((pick(rng, m, count), BTreeSet::new()))
        }
        TerminalCase::AllY => {
            if n == 0 {
                return Err(GenError::InfeasibleCase("no intervals to take as terminals"));
            }
            Ok((BTreeSet::new(), (1..=n).collect()))
        }
        TerminalCase::SubsetY => {
            if n < 2 {
                return Err(GenError::InfeasibleCase(
                    "a proper interval subset needs n >= 2",
                ));
            }
            let count = rng.gen_range(1..=n - 1);
            Ok((BTreeSet::new(), pick(rng, n, count)))
        }
        TerminalCase::Mixed => {
            if n == 0 {
                return Err(GenError::InfeasibleCase(
                    "a mixed terminal set needs at least one interval",
                ));
            }
            let xc = rng.gen_range(1..=m);
            let yc = rng.gen_range(1..=n);
            Ok((pick(rng, m, xc), pick(rng, n, yc)))
        }
    }
}

/// Random simple graph with `2..=max_vertices` vertices and at least one edge,
/// for exercising the cover gadget.
pub fn gen_general_graph<R: Rng>(
    rng: &mut R,
    max_vertices: usize,
    max_edges: usize,
) -> Result<GeneralGraph, GenError> {
    if max_vertices < 2 || max_edges == 0 {
        return Err(GenError::BadConfig(
            "need at least two vertices and one edge",
        ));
    }
    let n = rng.gen_range(2..=max_vertices);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for u in 1..=n {
        for v in (u + 1)..=n {
            pairs.push((u, v));
        }
    }
    let count = rng.gen_range(1..=max_edges.min(pairs.len()));
    let chosen = sample(rng, pairs.len(), count);
    let edges: Vec<(usize, usize)> = chosen.into_iter().map(|i| pairs[i]).collect();
    Ok(GeneralGraph::new(n, edges).expect("sampled pairs are distinct and loop-free"))
}

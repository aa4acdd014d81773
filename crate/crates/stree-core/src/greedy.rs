//! Greedy Steiner solvers for the three one-sided terminal shapes on a
//! connected convex bipartite graph:
//!
//! * every x terminal: a single rightward far-reach walk;
//! * a proper subset of X terminal: a walk that bridges consecutive
//!   terminals, racing two candidate extensions at each gap;
//! * every y terminal: a marking scan over intervals sorted by right end.
//!
//! Each solver runs in time linear in m + n up to sorting and emits a full
//! trace of its decisions.

use std::collections::BTreeSet;

use crate::error::{GraphError, SolveError};
use crate::graph::{ConvexBipartiteGraph, Vertex};
use crate::solution::{BridgeIteration, MarkEvent, SteinerResult, Trace, WalkStep};

fn require_connected(graph: &ConvexBipartiteGraph) -> Result<(), SolveError> {
    if graph.is_connected() {
        Ok(())
    } else {
        Err(SolveError::Graph(GraphError::Disconnected))
    }
}

/// Minimum Steiner set when every x vertex is a terminal.
///
/// Walks left to right: at each position take the neighbor reaching farthest
/// right, jump to that reach, repeat until the last position is covered. The
/// chosen y vertices are the Steiner set.
pub fn solve_all_x(graph: &ConvexBipartiteGraph) -> Result<SteinerResult, SolveError> {
    require_connected(graph)?;
    let m = graph.m();
    let terminals: BTreeSet<Vertex> = (1..=m).map(Vertex::X).collect();
    if m == 1 {
        return SteinerResult::checked(
            graph,
            &terminals,
            BTreeSet::new(),
            Trace::Trivial {
                reason: "single x vertex".to_string(),
            },
        );
    }
    let mut steps = Vec::new();
    let mut chosen = BTreeSet::new();
    let mut z = 1usize;
    loop {
        let fr = graph.far_reach(z)?;
        let reach = graph.interval(fr.w).r;
        if reach <= z && z < m {
            // connected inputs always cross the cut z|z+1
            return Err(SolveError::Internal(format!(
                "walk stalled at x{z}: farthest reach is x{reach}"
            )));
        }
        steps.push(WalkStep {
            at: z,
            chose: fr.w,
            reach,
        });
        chosen.insert(Vertex::Y(fr.w));
        z = reach;
        if z == m {
            break;
        }
    }
    SteinerResult::checked(graph, &terminals, chosen, Trace::RightWalk { steps })
}

/// Minimum Steiner set when the terminals are a proper, nonempty subset of X.
///
/// Sorted terminals are covered left to right. While some terminal remains
/// uncovered, two extensions from the current anchor are raced: jumping to
/// the pivot interval's right end, versus restarting at the last covered
/// terminal. Whichever needs fewer new vertices is committed, its closing
/// interval becomes the new pivot, and the covered prefix advances.
pub fn solve_subset_x(
    graph: &ConvexBipartiteGraph,
    terminals_x: &BTreeSet<usize>,
) -> Result<SteinerResult, SolveError> {
    if terminals_x.is_empty() {
        return Err(SolveError::EmptyTerminals);
    }
    for &p in terminals_x {
        if p == 0 || p > graph.m() {
            return Err(SolveError::BadTerminal(format!("x{p}")));
        }
    }
    if terminals_x.len() == graph.m() {
        return Err(SolveError::WrongCase(
            "terminals cover the whole x side; use the all-x solver",
        ));
    }
    require_connected(graph)?;
    let terminals: BTreeSet<Vertex> = terminals_x.iter().map(|&p| Vertex::X(p)).collect();
    let sorted: Vec<usize> = terminals_x.iter().copied().collect();
    let k = sorted.len();
    if k == 1 {
        return SteinerResult::checked(
            graph,
            &terminals,
            BTreeSet::new(),
            Trace::Trivial {
                reason: "single terminal".to_string(),
            },
        );
    }

    // 1-based rank of the last terminal whose coverage is certified by `pivot`
    let rank_reached = |pivot: usize| -> usize {
        let iv = graph.interval(pivot);
        sorted
            .iter()
            .rposition(|&z| iv.contains(z))
            .map(|i| i + 1)
            .unwrap_or(0)
    };
    // extend from `from` until the interval carrying the walk sees `target`;
    // returns (collected vertices, final position, closing interval)
    let extend = |mut from: usize, target: usize| -> Result<(Vec<Vertex>, usize, usize), SolveError> {
        let mut picked = Vec::new();
        loop {
            let w = graph.far_reach(from)?.w;
            if graph.interval(w).contains(target) {
                return Ok((picked, from, w));
            }
            let reach = graph.interval(w).r;
            if reach <= from {
                return Err(SolveError::Internal(format!(
                    "bridge stalled at x{from} before reaching x{target}"
                )));
            }
            picked.push(Vertex::Y(w));
            picked.push(Vertex::X(reach));
            from = reach;
        }
    };

    let mut chosen: BTreeSet<Vertex> = BTreeSet::new();
    let start = sorted[0];
    let mut pivot = graph.far_reach(start)?.w;
    let first_pivot = pivot;
    chosen.insert(Vertex::Y(pivot));
    let mut rank = rank_reached(pivot);
    debug_assert!(rank >= 1, "pivot covers its own anchor terminal");
    let initial_rank = rank;
    let mut anchor = start;
    let mut iterations = Vec::new();

    while rank < k {
        let target = sorted[rank]; // next uncovered terminal
        let p_start = graph.interval(pivot).r;
        let q_start = sorted[rank - 1];
        let mut s1: Vec<Vertex> = Vec::new();
        let s2: Vec<Vertex>;
        if p_start != q_start {
            s1.push(Vertex::X(p_start));
        }
        let (more1, p_end, p_close) = extend(p_start, target)?;
        s1.extend(more1);
        let (list2, q_end, q_close) = extend(q_start, target)?;
        s2 = list2;

        let chose_jump = s1.len() < s2.len();
        let (branch, end, close) = if chose_jump {
            (&s1, p_end, p_close)
        } else {
            (&s2, q_end, q_close)
        };
        chosen.extend(branch.iter().copied());
        chosen.insert(Vertex::Y(close));
        let next_rank = rank_reached(close);
        if next_rank <= rank {
            return Err(SolveError::Internal(format!(
                "bridge made no progress past terminal rank {rank}"
            )));
        }
        iterations.push(BridgeIteration {
            anchor,
            pivot,
            target,
            p_start,
            q_start,
            s1,
            s2,
            chose_jump,
            closing: close,
            next_anchor: end,
            next_rank,
        });
        anchor = end;
        pivot = close;
        rank = next_rank;
    }

    let trace = Trace::BridgeWalk {
        start,
        first_pivot,
        initial_rank,
        terminal_count: k,
        iterations,
    };
    SteinerResult::checked(graph, &terminals, chosen, trace)
}

/// Scan order for the marking solver: ascending right end, ties by ascending
/// left end, then input order.
fn right_end_order(graph: &ConvexBipartiteGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=graph.n()).collect();
    order.sort_by_key(|&y| {
        let iv = graph.interval(y);
        (iv.r, iv.l, y)
    });
    order
}

/// Minimum Steiner set when every y vertex is a terminal.
///
/// Intervals are scanned by ascending right end. An unmarked interval stabs
/// its own right end, marking everything that position touches. A marked
/// interval is skipped when its right end is the last position or when the
/// next interval's right end is already reachable from a marked interval;
/// otherwise it stabs too. The stabbed positions are the Steiner set.
pub fn solve_all_y(graph: &ConvexBipartiteGraph) -> Result<SteinerResult, SolveError> {
    let n = graph.n();
    if n == 0 {
        return Err(SolveError::EmptyTerminals);
    }
    require_connected(graph)?;
    let terminals: BTreeSet<Vertex> = (1..=n).map(Vertex::Y).collect();
    if n == 1 {
        return SteinerResult::checked(
            graph,
            &terminals,
            BTreeSet::new(),
            Trace::Trivial {
                reason: "single y vertex".to_string(),
            },
        );
    }
    let order = right_end_order(graph);
    let m = graph.m();
    let mut marked = vec![false; n + 1];
    let mut stabbed: BTreeSet<usize> = BTreeSet::new();
    let mut events = Vec::new();

    let mark_all = |pos: usize, marked: &mut Vec<bool>| -> Vec<usize> {
        let mut newly = Vec::new();
        for y in 1..=n {
            if !marked[y] && graph.interval(y).contains(pos) {
                marked[y] = true;
                newly.push(y);
            }
        }
        newly
    };

    for (idx, &y) in order.iter().enumerate() {
        let step = idx + 1;
        let iv = graph.interval(y);
        if !marked[y] {
            stabbed.insert(iv.r);
            let newly = mark_all(iv.r, &mut marked);
            events.push(MarkEvent {
                step,
                y: Some(y),
                already_marked: false,
                added: Some(iv.r),
                newly_marked: newly,
                note: "unmarked interval, stab its right end".to_string(),
            });
            continue;
        }
        if iv.r == m {
            events.push(MarkEvent {
                step,
                y: Some(y),
                already_marked: true,
                added: None,
                newly_marked: Vec::new(),
                note: "right end is the last position".to_string(),
            });
            continue;
        }
        // connected inputs give the scan's last interval r = m, so a
        // successor always exists here; treat a missing one as unreachable
        let reachable = order.get(idx + 1).is_some_and(|&next| {
            let next_r = graph.interval(next).r;
            (1..=n).any(|j| marked[j] && graph.interval(j).contains(next_r))
        });
        if reachable {
            events.push(MarkEvent {
                step,
                y: Some(y),
                already_marked: true,
                added: None,
                newly_marked: Vec::new(),
                note: "next right end reachable from a marked interval".to_string(),
            });
        } else {
            stabbed.insert(iv.r);
            let newly = mark_all(iv.r, &mut marked);
            events.push(MarkEvent {
                step,
                y: Some(y),
                already_marked: true,
                added: Some(iv.r),
                newly_marked: newly,
                note: "next right end unreachable, stab again".to_string(),
            });
        }
    }
    events.push(MarkEvent {
        step: n + 1,
        y: None,
        already_marked: false,
        added: None,
        newly_marked: Vec::new(),
        note: "scan complete".to_string(),
    });

    let chosen: BTreeSet<Vertex> = stabbed.into_iter().map(Vertex::X).collect();
    SteinerResult::checked(graph, &terminals, chosen, Trace::MarkScan { order, events })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Interval;
    use crate::oracle::min_steiner_brute;

    fn graph(m: usize, ivs: &[(usize, usize)]) -> ConvexBipartiteGraph {
        ConvexBipartiteGraph::new(m, ivs.iter().map(|&(l, r)| Interval::new(l, r)).collect())
            .unwrap()
    }

    fn y_set(ids: &[usize]) -> BTreeSet<Vertex> {
        ids.iter().map(|&i| Vertex::Y(i)).collect()
    }

    fn x_set(ids: &[usize]) -> BTreeSet<Vertex> {
        ids.iter().map(|&i| Vertex::X(i)).collect()
    }

    /// Four positions, ladder of overlapping intervals.
    fn ladder4() -> ConvexBipartiteGraph {
        graph(4, &[(1, 2), (1, 3), (2, 4), (3, 4)])
    }

    #[test]
    fn all_x_walk_on_ladder() {
        let res = solve_all_x(&ladder4()).unwrap();
        assert_eq!(res.steiner_set, y_set(&[2, 4]));
        assert_eq!(res.size, 2);
        match &res.trace {
            Trace::RightWalk { steps } => {
                assert_eq!(
                    steps,
                    &vec![
                        WalkStep {
                            at: 1,
                            chose: 2,
                            reach: 3
                        },
                        WalkStep {
                            at: 3,
                            chose: 4,
                            reach: 4
                        },
                    ]
                );
            }
            other => panic!("expected walk trace, got {other:?}"),
        }
    }

    #[test]
    fn all_x_two_interval_path() {
        let res = solve_all_x(&graph(3, &[(1, 2), (2, 3)])).unwrap();
        assert_eq!(res.steiner_set, y_set(&[1, 2]));
    }

    #[test]
    fn all_x_single_position_is_trivial() {
        let res = solve_all_x(&graph(1, &[(1, 1)])).unwrap();
        assert!(res.steiner_set.is_empty());
        assert!(matches!(res.trace, Trace::Trivial { .. }));
    }

    #[test]
    fn all_x_rejects_disconnected() {
        assert!(matches!(
            solve_all_x(&graph(4, &[(1, 2), (3, 4)])),
            Err(SolveError::Graph(GraphError::Disconnected))
        ));
    }

    #[test]
    fn all_x_matches_oracle_on_ladder() {
        let g = ladder4();
        let r: BTreeSet<Vertex> = (1..=4).map(Vertex::X).collect();
        let oracle = min_steiner_brute(&g, &r).unwrap();
        assert_eq!(solve_all_x(&g).unwrap().size, oracle.optimum);
    }

    /// Thirteen positions, ten intervals, eight terminals: the walk must skip
    /// a terminal rank (rank 6 is certified together with rank 7) and take
    /// the jump branch twice.
    fn bridge13() -> ConvexBipartiteGraph {
        graph(
            13,
            &[
                (1, 3),
                (2, 4),
                (3, 4),
                (3, 5),
                (5, 6),
                (6, 8),
                (6, 10),
                (9, 11),
                (10, 12),
                (11, 13),
            ],
        )
    }

    #[test]
    fn subset_x_bridging_walk_full_replay() {
        let g = bridge13();
        let r = BTreeSet::from([1usize, 3, 4, 6, 8, 11, 12, 13]);
        let res = solve_subset_x(&g, &r).unwrap();
        let expected: BTreeSet<Vertex> = y_set(&[1, 4, 5, 7, 9, 10])
            .union(&x_set(&[5, 10]))
            .copied()
            .collect();
        assert_eq!(res.steiner_set, expected);
        assert_eq!(res.size, 8);

        let Trace::BridgeWalk {
            start,
            first_pivot,
            initial_rank,
            terminal_count,
            iterations,
        } = &res.trace
        else {
            panic!("expected bridge trace");
        };
        assert_eq!((*start, *first_pivot), (1, 1));
        assert_eq!((*initial_rank, *terminal_count), (2, 8));
        assert_eq!(iterations.len(), 5);

        // the five bridging decisions, in order
        let summary: Vec<(usize, usize, bool, usize, usize)> = iterations
            .iter()
            .map(|it| (it.p_start, it.q_start, it.chose_jump, it.closing, it.next_rank))
            .collect();
        assert_eq!(
            summary,
            vec![
                (3, 3, false, 4, 3),
                (5, 4, true, 5, 4),
                (6, 6, false, 7, 5),
                (10, 8, true, 9, 7),
                (12, 12, false, 10, 8),
            ]
        );
        // racing branches never differ by more than one vertex
        for it in iterations {
            let d = it.s1.len().abs_diff(it.s2.len());
            assert!(d <= 1, "branch sizes {} vs {}", it.s1.len(), it.s2.len());
        }
        // iteration 2 races {x5} against {y4, x5}
        assert_eq!(iterations[1].s1, vec![Vertex::X(5)]);
        assert_eq!(iterations[1].s2, vec![Vertex::Y(4), Vertex::X(5)]);
    }

    #[test]
    fn subset_x_two_far_terminals() {
        let g = graph(5, &[(1, 3), (3, 5)]);
        let r = BTreeSet::from([1usize, 5]);
        let res = solve_subset_x(&g, &r).unwrap();
        assert_eq!(
            res.steiner_set,
            BTreeSet::from([Vertex::Y(1), Vertex::Y(2), Vertex::X(3)])
        );
        assert_eq!(res.size, 3);
    }

    #[test]
    fn subset_x_guards() {
        let g = graph(3, &[(1, 2), (2, 3)]);
        assert!(matches!(
            solve_subset_x(&g, &BTreeSet::new()),
            Err(SolveError::EmptyTerminals)
        ));
        assert!(matches!(
            solve_subset_x(&g, &BTreeSet::from([1, 2, 3])),
            Err(SolveError::WrongCase(_))
        ));
        assert!(matches!(
            solve_subset_x(&g, &BTreeSet::from([9])),
            Err(SolveError::BadTerminal(_))
        ));
        let single = solve_subset_x(&g, &BTreeSet::from([2])).unwrap();
        assert!(single.steiner_set.is_empty());
    }

    #[test]
    fn subset_x_adjacent_terminals_need_one_bridge() {
        let g = graph(3, &[(1, 2), (2, 3)]);
        let res = solve_subset_x(&g, &BTreeSet::from([1, 2])).unwrap();
        assert_eq!(res.size, 1);
        let oracle = min_steiner_brute(&g, &x_set(&[1, 2])).unwrap();
        assert_eq!(res.size, oracle.optimum);
    }

    /// Eight positions, five intervals sorted by right end; replays the
    /// four marking decisions plus the exit row.
    fn scan8() -> ConvexBipartiteGraph {
        graph(8, &[(1, 2), (2, 4), (4, 6), (4, 7), (7, 8)])
    }

    #[test]
    fn all_y_marking_scan_full_replay() {
        let res = solve_all_y(&scan8()).unwrap();
        assert_eq!(res.steiner_set, x_set(&[2, 4, 7]));
        assert_eq!(res.size, 3);

        let Trace::MarkScan { order, events } = &res.trace else {
            panic!("expected scan trace");
        };
        assert_eq!(order, &vec![1, 2, 3, 4, 5]);
        assert_eq!(events.len(), 6);

        let rows: Vec<(usize, Option<usize>, bool, Option<usize>, Vec<usize>)> = events
            .iter()
            .map(|e| {
                (
                    e.step,
                    e.y,
                    e.already_marked,
                    e.added,
                    e.newly_marked.clone(),
                )
            })
            .collect();
        assert_eq!(
            rows,
            vec![
                (1, Some(1), false, Some(2), vec![1, 2]),
                (2, Some(2), true, Some(4), vec![3, 4]),
                (3, Some(3), true, None, vec![]),
                (4, Some(4), true, Some(7), vec![5]),
                (5, Some(5), true, None, vec![]),
                (6, None, false, None, vec![]),
            ]
        );
    }

    #[test]
    fn all_y_two_interval_path() {
        let res = solve_all_y(&graph(3, &[(1, 2), (2, 3)])).unwrap();
        assert_eq!(res.steiner_set, x_set(&[2]));
    }

    #[test]
    fn all_y_single_interval_is_trivial() {
        let res = solve_all_y(&graph(3, &[(1, 3)])).unwrap();
        assert!(res.steiner_set.is_empty());
    }

    #[test]
    fn all_y_matches_oracle_on_scan_fixture() {
        let g = scan8();
        let r: BTreeSet<Vertex> = (1..=5).map(Vertex::Y).collect();
        let oracle = min_steiner_brute(&g, &r).unwrap();
        assert_eq!(solve_all_y(&g).unwrap().size, oracle.optimum);
        assert_eq!(oracle.optimum, 3);
    }

    #[test]
    fn all_y_prefix_positions_dominate_oracle_witness() {
        let g = scan8();
        let r: BTreeSet<Vertex> = (1..=5).map(Vertex::Y).collect();
        let ours: Vec<usize> = solve_all_y(&g)
            .unwrap()
            .steiner_set
            .iter()
            .map(|v| match v {
                Vertex::X(p) => *p,
                Vertex::Y(_) => unreachable!("scan only stabs x positions"),
            })
            .collect();
        let oracle: Vec<usize> = min_steiner_brute(&g, &r)
            .unwrap()
            .witness
            .iter()
            .filter_map(|v| match v {
                Vertex::X(p) => Some(*p),
                Vertex::Y(_) => None,
            })
            .collect();
        assert_eq!(ours.len(), oracle.len());
        for (z_opt, z_ours) in oracle.iter().zip(ours.iter()) {
            assert!(z_opt <= z_ours, "optimal stab {z_opt} right of ours {z_ours}");
        }
    }
}

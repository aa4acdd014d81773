//! Randomized properties: every solver agrees with the brute-force oracle on
//! small instances, traces obey their structural invariants, and results are
//! deterministic and stable under relabeling.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stree_core::{
    classify, gen_convex_bipartite, gen_interval_family, gen_terminals, min_steiner_brute,
    solve_all_x, solve_all_y, solve_general, solve_interval_steiner, solve_subset_x,
    solve_subset_y, validate_k_star_caterpillar_convex, Adjacency, Caterpillar,
    ConvexBipartiteGraph, GenConfig, InstanceClass, PlanShape, TerminalCase, Trace, Vertex,
};

fn connected_graph(seed: u64, m: usize, n: usize, density: f64) -> ConvexBipartiteGraph {
    gen_convex_bipartite(&GenConfig {
        seed,
        m,
        n,
        density,
        connect: true,
    })
    .expect("feasible generator configuration")
}

fn x_positions(set: &BTreeSet<Vertex>) -> Vec<usize> {
    set.iter()
        .map(|v| match v {
            Vertex::X(p) => *p,
            Vertex::Y(i) => panic!("unexpected interval y{i} in a stab set"),
        })
        .collect()
}

/// Union-find on the induced subgraph, as an independent connectivity check.
fn union_find_connected(g: &ConvexBipartiteGraph, set: &BTreeSet<Vertex>) -> bool {
    let vs: Vec<Vertex> = set.iter().copied().collect();
    if vs.len() <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..vs.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, &v) in vs.iter().enumerate() {
        if let Vertex::Y(y) = v {
            let iv = g.interval(y);
            for p in iv.l..=iv.r {
                if let Ok(j) = vs.binary_search(&Vertex::X(p)) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
    }
    let root = find(&mut parent, 0);
    (1..vs.len()).all(|i| find(&mut parent, i) == root)
}

proptest! {
    #[test]
    fn all_x_solution_is_optimal(
        (m, n, seed, density) in (2usize..=8, 1usize..=6, any::<u64>(), 0.05f64..=1.0)
    ) {
        let g = connected_graph(seed, m, n, density);
        let res = solve_all_x(&g).unwrap();
        let terms: BTreeSet<Vertex> = (1..=m).map(Vertex::X).collect();
        let oracle = min_steiner_brute(&g, &terms).unwrap();
        prop_assert_eq!(res.size, oracle.optimum);
    }

    #[test]
    fn subset_x_solution_is_optimal(
        (m, n, seed, density) in (2usize..=8, 1usize..=6, any::<u64>(), 0.05f64..=1.0)
    ) {
        let g = connected_graph(seed, m, n, density);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let (rx, _) = gen_terminals(m, n, TerminalCase::SubsetX, &mut rng).unwrap();
        let res = solve_subset_x(&g, &rx).unwrap();
        let terms: BTreeSet<Vertex> = rx.iter().map(|&p| Vertex::X(p)).collect();
        let oracle = min_steiner_brute(&g, &terms).unwrap();
        prop_assert_eq!(res.size, oracle.optimum);
    }

    #[test]
    fn all_y_solution_is_optimal_and_rightmost(
        (m, n, seed, density) in (1usize..=8, 1usize..=6, any::<u64>(), 0.05f64..=1.0)
    ) {
        let g = connected_graph(seed, m, n, density);
        let res = solve_all_y(&g).unwrap();
        let terms: BTreeSet<Vertex> = (1..=n).map(Vertex::Y).collect();
        let oracle = min_steiner_brute(&g, &terms).unwrap();
        prop_assert_eq!(res.size, oracle.optimum);
        // the scan stabs right ends, so any optimum sits pointwise at or
        // left of it; the oracle witness is one such optimum
        let algo = x_positions(&res.steiner_set);
        let witness = x_positions(&oracle.witness);
        prop_assert_eq!(algo.len(), witness.len());
        for (w, a) in witness.iter().zip(algo.iter()) {
            prop_assert!(w <= a, "witness stab {} right of chosen {}", w, a);
        }
    }

    #[test]
    fn subset_y_solution_is_optimal(
        (m, n, seed, density) in (1usize..=8, 2usize..=6, any::<u64>(), 0.05f64..=1.0)
    ) {
        let g = connected_graph(seed, m, n, density);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xdee9);
        let (_, ry) = gen_terminals(m, n, TerminalCase::SubsetY, &mut rng).unwrap();
        let res = solve_subset_y(&g, &ry).unwrap();
        let terms: BTreeSet<Vertex> = ry.iter().map(|&y| Vertex::Y(y)).collect();
        let oracle = min_steiner_brute(&g, &terms).unwrap();
        prop_assert_eq!(res.size, oracle.optimum);
    }

    #[test]
    fn mixed_solution_is_optimal(
        (m, n, seed, density) in (1usize..=7, 1usize..=5, any::<u64>(), 0.05f64..=1.0)
    ) {
        let g = connected_graph(seed, m, n, density);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x313d);
        let (rx, ry) = gen_terminals(m, n, TerminalCase::Mixed, &mut rng).unwrap();
        let res = solve_general(&g, &rx, &ry).unwrap();
        let terms: BTreeSet<Vertex> = rx
            .iter()
            .map(|&p| Vertex::X(p))
            .chain(ry.iter().map(|&y| Vertex::Y(y)))
            .collect();
        let oracle = min_steiner_brute(&g, &terms).unwrap();
        prop_assert_eq!(res.size, oracle.optimum);
    }

    #[test]
    fn bridging_branches_never_differ_by_more_than_one(
        (m, n, seed, density) in (2usize..=10, 1usize..=8, any::<u64>(), 0.05f64..=1.0)
    ) {
        let g = connected_graph(seed, m, n, density);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb41a);
        let (rx, _) = gen_terminals(m, n, TerminalCase::SubsetX, &mut rng).unwrap();
        let res = solve_subset_x(&g, &rx).unwrap();
        if let Trace::BridgeWalk { iterations, .. } = &res.trace {
            let mut rank = None;
            for it in iterations {
                prop_assert!(
                    it.s1.len().abs_diff(it.s2.len()) <= 1,
                    "branch lengths {} vs {}",
                    it.s1.len(),
                    it.s2.len()
                );
                // covered terminal count strictly advances
                if let Some(prev) = rank {
                    prop_assert!(it.next_rank > prev);
                }
                rank = Some(it.next_rank);
            }
        }
    }

    #[test]
    fn table_entries_computed_exactly_once(
        (m, n, seed, density) in (1usize..=10, 2usize..=8, any::<u64>(), 0.05f64..=1.0)
    ) {
        let g = connected_graph(seed, m, n, density);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7ab1e);
        let (_, ry) = gen_terminals(m, n, TerminalCase::SubsetY, &mut rng).unwrap();
        let res = solve_subset_y(&g, &ry).unwrap();
        if let Trace::Dp(a) = &res.trace {
            prop_assert_eq!(a.computed_entries, a.f_entries.len());
            prop_assert_eq!(a.instance_class, classify(&g, &ry).unwrap());
            if a.instance_class != InstanceClass::WindowStart {
                prop_assert_eq!(a.f_entries.len(), a.sigma.len());
                // the set is exactly what the chain and the patches added,
                // and the table value stays a lower bound on its size
                let chain_adds: usize = a
                    .chain
                    .iter()
                    .map(|s| usize::from(s.added_x.is_some()) + usize::from(s.added_y.is_some()))
                    .sum();
                prop_assert_eq!(res.size, chain_adds + a.patches.len());
                prop_assert!(res.size >= a.answer);
                if a.plan != PlanShape::Synthesized {
                    // those plans keep the table's chain, which meets the
                    // table value exactly
                    prop_assert_eq!(chain_adds, a.answer);
                }
            }
        }
    }

    #[test]
    fn interval_projection_is_optimal(
        (n, seed, density) in (1usize..=6, any::<u64>(), 0.05f64..=1.0)
    ) {
        let model = gen_interval_family(&GenConfig {
            seed,
            m: 1,
            n,
            density,
            connect: true,
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1f);
        let count = (seed as usize % n) + 1;
        let r: BTreeSet<usize> = rand::seq::index::sample(&mut rng, n, count)
            .into_iter()
            .map(|i| i + 1)
            .collect();
        let res = solve_interval_steiner(&model, &r).unwrap();
        let oracle = min_steiner_brute(&model.intersection_graph(), &r).unwrap();
        prop_assert_eq!(res.size, oracle.optimum);
    }

    #[test]
    fn induced_connectivity_matches_union_find(
        (m, n, seed, density, mask) in
            (1usize..=8, 0usize..=6, any::<u64>(), 0.05f64..=1.0, any::<u64>())
    ) {
        let g = gen_convex_bipartite(&GenConfig {
            seed,
            m,
            n,
            density,
            connect: false,
        })
        .unwrap();
        let set: BTreeSet<Vertex> = g
            .vertices()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| mask >> (i % 64) & 1 == 1)
            .map(|(_, v)| v)
            .collect();
        prop_assert_eq!(g.induced_connected(&set), union_find_connected(&g, &set));
    }

    #[test]
    fn far_reach_reports_all_tied_neighbors(
        (m, n, seed, density) in (1usize..=9, 1usize..=7, any::<u64>(), 0.05f64..=1.0)
    ) {
        let g = connected_graph(seed, m, n, density);
        for p in 1..=m {
            let neighbors: Vec<usize> = g.y_neighbors(p).collect();
            if neighbors.is_empty() {
                prop_assert!(g.far_reach(p).is_err());
                continue;
            }
            let fr = g.far_reach(p).unwrap();
            let best = neighbors.iter().map(|&y| g.interval(y).r).max().unwrap();
            for &y in &fr.t_set {
                prop_assert!(neighbors.contains(&y));
                prop_assert_eq!(g.interval(y).r, best);
            }
            prop_assert_eq!(Some(&fr.w), fr.t_set.iter().next_back());
            let tied = neighbors.iter().filter(|&&y| g.interval(y).r == best).count();
            prop_assert_eq!(fr.t_set.len(), tied);
        }
    }

    #[test]
    fn interval_relabeling_preserves_optimum_size(
        (m, n, seed, density, rot) in
            (1usize..=8, 2usize..=6, any::<u64>(), 0.05f64..=1.0, 1usize..=5)
    ) {
        let g = connected_graph(seed, m, n, density);
        // rotate interval labels: new index i holds old interval at i+rot
        let shift = rot % n;
        let rotated: Vec<_> = (0..n)
            .map(|i| g.intervals()[(i + shift) % n])
            .collect();
        let g2 = ConvexBipartiteGraph::new(m, rotated).unwrap();
        prop_assert_eq!(
            solve_all_y(&g).unwrap().size,
            solve_all_y(&g2).unwrap().size
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0ff5e7);
        let (_, ry) = gen_terminals(m, n, TerminalCase::SubsetY, &mut rng).unwrap();
        let ry2: BTreeSet<usize> = ry
            .iter()
            .map(|&y| (y - 1 + n - shift) % n + 1)
            .collect();
        prop_assert_eq!(
            solve_subset_y(&g, &ry).unwrap().size,
            solve_subset_y(&g2, &ry2).unwrap().size
        );
    }

    #[test]
    fn solving_twice_is_identical(
        (m, n, seed, density) in (1usize..=8, 1usize..=6, any::<u64>(), 0.05f64..=1.0)
    ) {
        let g = connected_graph(seed, m, n, density);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd0);
        let case = TerminalCase::ALL[(seed % 5) as usize];
        let Ok((rx, ry)) = gen_terminals(m, n, case, &mut rng) else {
            return Ok(());
        };
        let a = solve_general(&g, &rx, &ry).unwrap();
        let b = solve_general(&g, &rx, &ry).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn convex_neighborhoods_induce_path_subtrees(
        (m, n, seed, density) in (1usize..=9, 1usize..=7, any::<u64>(), 0.05f64..=1.0)
    ) {
        // a bare path over the positions is the k=0 arrangement; interval
        // neighborhoods are exactly the connected runs of that path
        let g = gen_convex_bipartite(&GenConfig {
            seed,
            m,
            n,
            density,
            connect: false,
        })
        .unwrap();
        let path = Caterpillar::path((1..=m).map(Vertex::X).collect());
        let x_side: BTreeSet<Vertex> = (1..=m).map(Vertex::X).collect();
        let neighborhoods: Vec<BTreeSet<Vertex>> = (1..=n)
            .map(|y| {
                let iv = g.interval(y);
                (iv.l..=iv.r).map(Vertex::X).collect()
            })
            .collect();
        prop_assert_eq!(
            validate_k_star_caterpillar_convex(&x_side, &neighborhoods, &path, 0),
            Ok(true)
        );
    }
}

#[test]
fn gapped_neighborhood_fails_the_path_arrangement() {
    let path = Caterpillar::path(vec![Vertex::X(1), Vertex::X(2), Vertex::X(3)]);
    let x_side: BTreeSet<Vertex> = (1..=3).map(Vertex::X).collect();
    let gapped = vec![BTreeSet::from([Vertex::X(1), Vertex::X(3)])];
    assert_eq!(
        validate_k_star_caterpillar_convex(&x_side, &gapped, &path, 0),
        Ok(false)
    );
}

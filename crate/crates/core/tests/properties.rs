//! Property tests over randomly generated structures.

use proptest::prelude::*;
use span2_core::goodness::{build_cone_bipartite, p1_statistic};
use span2_core::graph::{
    gen_gnp, gen_random_degree2, read_edge_list, write_edge_list, Graph,
};
use span2_core::matching::{max_matching, saturating_or_witness, BipartiteInstance, HallOutcome, Matching};
use span2_core::pattern::{deficient_vertices, maximalize, square};
use span2_core::rng::SplitMix64;

fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..24, any::<u64>(), 0.0f64..1.0).prop_map(|(n, seed, p)| gen_gnp(n, p, seed).unwrap())
}

fn arb_bipartite() -> impl Strategy<Value = BipartiteInstance> {
    (0usize..10, 0usize..10, any::<u64>(), 0.0f64..1.0).prop_map(|(nl, nr, seed, d)| {
        let mut rng = SplitMix64::new(seed);
        let adj = (0..nl)
            .map(|_| (0..nr).filter(|_| rng.next_f64() < d).collect())
            .collect();
        BipartiteInstance::unlabeled(nl, nr, adj).unwrap()
    })
}

#[test]
fn edge_list_identity_on_a_thousand_graphs() {
    for seed in 0..1000u64 {
        let g = if seed % 2 == 0 {
            gen_random_degree2(1 + (seed as usize % 120), seed)
        } else {
            gen_gnp(1 + (seed as usize % 60), (seed % 10) as f64 / 10.0, seed).unwrap()
        };
        let back = read_edge_list(&write_edge_list(&g)).unwrap();
        assert_eq!(back, g, "round trip failed at seed {seed}");
    }
}

fn bfs_dist(h: &Graph, start: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; h.n()];
    dist[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &v in h.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

proptest! {
    #[test]
    fn edge_list_round_trips(g in arb_graph()) {
        prop_assert!(g.validate());
        let text = write_edge_list(&g);
        let back = read_edge_list(&text).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn maximalize_invariants(n in 1usize..80, seed in any::<u64>()) {
        let h = gen_random_degree2(n, seed);
        prop_assert!(h.validate());
        prop_assert!(h.max_degree() <= 2);
        let m = maximalize(&h).unwrap();
        prop_assert!(m.max_degree() <= 2);
        for (u, v) in h.edges() {
            prop_assert!(m.has_edge(u, v));
        }
        // No addable pair: every non-adjacent pair has a saturated endpoint.
        for u in 0..n {
            for v in (u + 1)..n {
                prop_assert!(m.degree(u) == 2 || m.degree(v) == 2 || m.has_edge(u, v));
            }
        }
        let deficient = deficient_vertices(&m);
        prop_assert!(deficient.len() <= 2);
    }

    #[test]
    fn square_is_distance_at_most_two(n in 1usize..40, seed in any::<u64>()) {
        let h = gen_random_degree2(n, seed);
        let sq = square(&h);
        for u in 0..n {
            let dist = bfs_dist(&h, u);
            for v in 0..n {
                prop_assert_eq!(sq.has_edge(u, v), v != u && dist[v] <= 2);
            }
        }
    }

    #[test]
    fn matching_is_valid_and_maximum(b in arb_bipartite()) {
        let m = max_matching(&b);
        prop_assert!(m.is_valid_for(&b));
        // Kuhn oracle.
        fn kuhn(b: &BipartiteInstance, l: usize, seen: &mut [bool], mr: &mut [usize]) -> bool {
            for &r in b.adj(l) {
                if !seen[r] {
                    seen[r] = true;
                    if mr[r] == usize::MAX || kuhn(b, mr[r], seen, mr) {
                        mr[r] = l;
                        return true;
                    }
                }
            }
            false
        }
        let mut mr = vec![usize::MAX; b.right_size()];
        let mut oracle = 0;
        for l in 0..b.left_size() {
            let mut seen = vec![false; b.right_size()];
            if kuhn(&b, l, &mut seen, &mut mr) {
                oracle += 1;
            }
        }
        prop_assert_eq!(m.len(), oracle);
    }

    #[test]
    fn hall_outcome_dichotomy(b in arb_bipartite()) {
        match saturating_or_witness(&b) {
            HallOutcome::Saturating(m) => {
                prop_assert_eq!(m.len(), b.left_size());
                prop_assert!(m.is_valid_for(&b));
            }
            HallOutcome::Deficient(w) => {
                prop_assert!(w.verify(&b));
                prop_assert!(w.neighborhood.len() < w.left_subset.len());
            }
        }
    }

    #[test]
    fn cone_bipartite_containment(seed in any::<u64>(), p in 0.0f64..1.0) {
        let g = gen_gnp(12, p, seed).unwrap();
        let sets = vec![vec![0, 1], vec![2], vec![]];
        let right: Vec<usize> = (3..12).collect();
        let b = build_cone_bipartite(&g, &sets, &right).unwrap();
        for (l, set) in sets.iter().enumerate() {
            for (r, &u) in right.iter().enumerate() {
                let expected = set.iter().all(|&x| g.has_edge(x, u));
                prop_assert_eq!(b.adj(l).binary_search(&r).is_ok(), expected);
            }
        }
    }

    #[test]
    fn embed_is_total_on_valid_inputs(n in 0usize..80, seed in any::<u64>(), p in 0.0f64..1.0) {
        // Whatever happens inside, a valid (g, h) pair of equal size must
        // come back as an outcome, never an error or panic.
        let params = span2_core::goodness::GoodnessParams::desk(1.0);
        let h = gen_random_degree2(n, seed);
        let g = gen_gnp(n, p, seed).unwrap();
        let outcome = span2_core::embedder::embed(&g, &h, &params, seed).unwrap();
        if let span2_core::embedder::EmbedOutcome::Success(e) = outcome {
            prop_assert!(span2_core::embedder::verify_embedding(&g, &h, &e.map).is_ok());
        }
    }

    #[test]
    fn p1_statistic_monotone_under_union(seed in any::<u64>(), p in 0.0f64..1.0) {
        let g = gen_gnp(20, p, seed).unwrap();
        let m = Matching { pairs: vec![(0, 1), (2, 3)] };
        let u1: Vec<usize> = vec![5, 6, 7];
        let u2: Vec<usize> = vec![8, 9];
        let mut both = u1.clone();
        both.extend(&u2);
        let s1 = p1_statistic(&g, &m, &u1).unwrap();
        let s2 = p1_statistic(&g, &m, &u2).unwrap();
        let s = p1_statistic(&g, &m, &both).unwrap();
        prop_assert!(s >= s1.max(s2));
        prop_assert!(s <= s1 + s2 + m.len());
    }
}

use proptest::prelude::*;
use shallowcode::disperser::{
    find_disperser, purge_right_half, sample_left_regular, thresholds, verify_disperser,
    verify_disperser_sampled, BipartiteGraph, CheckMode, DisperserError,
};
use shallowcode::Stream;

/// Left degree found by calibration for (n, m, γ, ε) = (12, 6, 1/2, 1/2).
const FIXTURE_DEGREE: usize = 2;

/// Bitmask enumeration of every left subset of the threshold size.
fn oracle_passes(g: &BipartiteGraph, gamma: f64, eps: f64) -> bool {
    let (size, need) = thresholds(g.n_left, g.n_right, gamma, eps);
    (0u32..1 << g.n_left)
        .filter(|s| s.count_ones() as usize == size)
        .all(|s| {
            let mut hit = 0u64;
            for v in 0..g.n_left {
                if s >> v & 1 == 1 {
                    for &r in &g.adj[v] {
                        hit |= 1 << r;
                    }
                }
            }
            hit.count_ones() as usize >= need
        })
}

#[test]
fn verifier_examples() {
    let full = BipartiteGraph::complete(6, 4);
    assert!(verify_disperser(&full, 0.3, 0.0).unwrap().passed);
    let empty = BipartiteGraph::new(4, 3, vec![vec![]; 4]).unwrap();
    let v = verify_disperser(&empty, 0.5, 0.5).unwrap();
    assert!(!v.passed);
    assert_eq!(v.witness, Some(vec![0, 1]));
    let paired = BipartiteGraph::new(4, 2, vec![vec![0], vec![0], vec![1], vec![1]]).unwrap();
    let v = verify_disperser(&paired, 0.5, 0.5).unwrap();
    assert!(v.passed);
    assert_eq!(v.subsets_checked, 6);
    assert_eq!(v.mode, CheckMode::Exhaustive);
}

#[test]
fn exhaustive_agrees_with_oracle_and_sampling() {
    let mut s = Stream::new(41);
    for i in 0..50 {
        let n = 4 + s.below_usize(13);
        let m = 2 + s.below_usize(10);
        let d = 1 + s.below_usize(m.min(3));
        let g = sample_left_regular(n, m, d, &mut s).unwrap();
        let gamma = [0.25, 0.5, 0.75][i % 3];
        let eps = [0.25, 0.5][i % 2];
        let exact = verify_disperser(&g, gamma, eps).unwrap();
        assert_eq!(exact.passed, oracle_passes(&g, gamma, eps));
        let sampled = verify_disperser_sampled(&g, gamma, eps, 10_000, &Stream::new(i as u64));
        if sampled.passed {
            assert!(
                exact.passed,
                "sampling passed a graph with a violating subset"
            );
        }
        if let Some(w) = exact.witness {
            let (_, need) = thresholds(n, m, gamma, eps);
            assert!(g.neighborhood(&w).len() < need);
        }
    }
}

fn success_rate(d: usize) -> usize {
    (0..100)
        .filter(|&t| find_disperser(12, 6, d, 0.5, 0.5, &Stream::new(1000 + t), 1).is_ok())
        .count()
}

#[test]
fn fixture_degree_is_the_smallest_reliable_one() {
    assert!(success_rate(FIXTURE_DEGREE - 1) <= 90);
    assert!(success_rate(FIXTURE_DEGREE) > 90);
    let found = find_disperser(12, 6, FIXTURE_DEGREE, 0.5, 0.5, &Stream::new(7), 100).unwrap();
    assert!(found.tries <= 100);
    assert!(found.verified);
    assert!(oracle_passes(&found.graph, 0.5, 0.5));
}

#[test]
fn search_edge_cases() {
    let found = find_disperser(8, 5, 5, 0.5, 0.0, &Stream::new(1), 3).unwrap();
    assert_eq!(found.tries, 1);
    assert_eq!(found.graph, BipartiteGraph::complete(8, 5));
    assert_eq!(
        find_disperser(8, 5, 2, 0.5, 0.2, &Stream::new(1), 0),
        Err(DisperserError::Exhausted(0))
    );
    assert!(matches!(
        find_disperser(8, 5, 6, 0.5, 0.2, &Stream::new(1), 3),
        Err(DisperserError::BadDegree { .. })
    ));
}

#[test]
fn sampling_is_deterministic_and_regular() {
    let a = sample_left_regular(1000, 500, 4, &mut Stream::new(12)).unwrap();
    let b = sample_left_regular(1000, 500, 4, &mut Stream::new(12)).unwrap();
    assert_eq!(a, b);
    assert!(a.adj.iter().all(|nb| nb.len() == 4));
    let mean = a.right_degrees().iter().sum::<usize>() as f64 / 500.0;
    assert!((mean - 8.0).abs() <= 0.8);
}

#[test]
fn purge_examples() {
    let star = BipartiteGraph::new(3, 2, vec![vec![1], vec![1], vec![1]]).unwrap();
    let p = purge_right_half(&star).unwrap();
    assert_eq!(p.n_right, 1);
    assert_eq!(p.edge_count(), 0);
    let g = sample_left_regular(100, 50, 3, &mut Stream::new(9)).unwrap();
    let p = purge_right_half(&g).unwrap();
    assert_eq!(p.n_right, 25);
    assert!(p.right_degrees().into_iter().max().unwrap() <= 12);
}

#[test]
fn graph_json_round_trip() {
    let g = sample_left_regular(10, 7, 3, &mut Stream::new(3)).unwrap();
    assert_eq!(BipartiteGraph::from_json(&g.to_json()).unwrap(), g);
}

proptest! {
    #[test]
    fn purge_respects_markov(seed in any::<u64>(), n in 1usize..60, m in 2usize..40, d in 1usize..5) {
        let d = d.min(m);
        let g = sample_left_regular(n, m, d, &mut Stream::new(seed)).unwrap();
        let p = purge_right_half(&g).unwrap();
        prop_assert_eq!(p.n_right, m / 2);
        let bound = 2 * g.edge_count() / m;
        prop_assert!(p.right_degrees().into_iter().max().unwrap_or(0) <= bound);
    }

    #[test]
    fn adding_edges_never_breaks_a_disperser(seed in any::<u64>()) {
        let mut s = Stream::new(seed);
        let g = sample_left_regular(8, 6, 2, &mut s).unwrap();
        let mut h = g.clone();
        let v = s.below_usize(8);
        let extra = s.below_usize(6) as u32;
        if !h.adj[v].contains(&extra) {
            h.adj[v].push(extra);
        }
        let before = verify_disperser(&g, 0.5, 0.34).unwrap().passed;
        let after = verify_disperser(&h, 0.5, 0.34).unwrap().passed;
        prop_assert!(!before || after);
    }
}

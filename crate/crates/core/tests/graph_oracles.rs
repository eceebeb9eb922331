use std::collections::BTreeMap;

use sgl_core::graph::{all_pairs_distances, enumerate_regular_graphs, sample_regular_graph, Graph};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Every simple d-regular graph on n vertices, by filtering all edge subsets of K_n.
fn regular_by_edge_subsets(n: usize, d: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        if mask.count_ones() as usize != n * d / 2 {
            continue;
        }
        let mut deg = vec![0; n];
        let chosen: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        for &(u, v) in &chosen {
            deg[u] += 1;
            deg[v] += 1;
        }
        if deg.iter().all(|&x| x == d) {
            out.push(chosen);
        }
    }
    out.sort();
    out
}

fn edge_lists(gs: &[Graph]) -> Vec<Vec<(usize, usize)>> {
    let mut v: Vec<_> = gs.iter().map(Graph::edges).collect();
    v.sort();
    v
}

#[test]
fn enumeration_matches_edge_subset_filter() {
    for (n, d, count) in [(4, 3, 1), (6, 3, 70), (6, 4, 15)] {
        let oracle = regular_by_edge_subsets(n, d);
        assert_eq!(oracle.len(), count);
        assert_eq!(edge_lists(&enumerate_regular_graphs(n, d).unwrap()), oracle);
    }
}

#[test]
fn six_four_graphs_are_matching_complements() {
    for g in enumerate_regular_graphs(6, 4).unwrap() {
        let missing: Vec<_> =
            (0..6).flat_map(|u| (u + 1..6).map(move |v| (u, v))).filter(|&(u, v)| !g.has_edge(u, v)).collect();
        assert_eq!(missing.len(), 3);
        let mut seen = [false; 6];
        for (u, v) in missing {
            assert!(!seen[u] && !seen[v]);
            seen[u] = true;
            seen[v] = true;
        }
    }
}

#[test]
fn k4_is_the_only_cubic_graph_on_four_vertices() {
    for seed in 0..100 {
        assert_eq!(sample_regular_graph(4, 3, seed).unwrap(), Graph::complete(4));
    }
}

#[test]
fn sampler_is_uniform_on_six_vertices() {
    let all = edge_lists(&enumerate_regular_graphs(6, 3).unwrap());
    let index: BTreeMap<_, _> = all.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    let samples = 10_000;
    let mut counts = vec![0u32; all.len()];
    for seed in 0..samples {
        counts[index[&sample_regular_graph(6, 3, seed).unwrap().edges()]] += 1;
    }
    let expected = samples as f64 / all.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new((all.len() - 1) as f64).unwrap().cdf(stat);
    assert!(p > 1e-3, "chi-square {stat}, p = {p}");
}

#[test]
fn petersen_is_strongly_regular() {
    // A² + A − 2I = J for srg(10, 3, 0, 1)
    let g = Graph::petersen();
    let n = g.n();
    let a = |i: usize, j: usize| g.has_edge(i, j) as i64;
    for i in 0..n {
        for j in 0..n {
            let sq: i64 = (0..n).map(|k| a(i, k) * a(k, j)).sum();
            let lhs = sq + a(i, j) - 2 * (i == j) as i64;
            assert_eq!(lhs, 1, "({i}, {j})");
        }
    }
    let m = all_pairs_distances(&g);
    assert_eq!(m.diameter(), 2.0);
}

#[test]
fn metric_axioms_on_samples() {
    for seed in 0..20 {
        let g = sample_regular_graph(12, 3, seed).unwrap();
        let m = all_pairs_distances(&g);
        for i in 0..12 {
            assert_eq!(m.get(i, i), 0.0);
            for j in 0..12 {
                assert_eq!(m.get(i, j), m.get(j, i));
                for k in 0..12 {
                    assert!(m.get(i, j) <= m.get(i, k) + m.get(k, j));
                }
            }
        }
    }
}

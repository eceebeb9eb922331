use proptest::prelude::*;
use rand::Rng;
use sgl_core::approximator::{build_universal_approximator, quotient_identity_check, Pairing};
use sgl_core::compression::{compress, decompose, dyadic, expectation_identity_check, hat_f, image_bound_check};
use sgl_core::graph::{all_pairs_distances, sample_regular_graph};
use sgl_core::poincare::{ratio, VertexMap};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn clustered_map() -> VertexMap {
    let mut values: Vec<usize> = (0..7).collect();
    values.extend(std::iter::repeat_n(7, 7));
    values.extend(std::iter::repeat_n(8, 6));
    VertexMap::new(values, 10).unwrap()
}

#[test]
fn pivot_is_uniform() {
    let f = clustered_map();
    let dy = dyadic(&f, 10, 0.1).unwrap();
    assert_eq!(dy.m0_prime, (0..7).collect::<Vec<_>>());
    let mut counts = [0u32; 7];
    for seed in 0..10_000 {
        counts[compress(&f, &dy, seed).1.unwrap()] += 1;
    }
    let e = 10_000.0 / 7.0;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let p = 1.0 - ChiSquared::new(6.0).unwrap().cdf(stat);
    assert!(p > 1e-3, "{counts:?}");
}

#[test]
fn single_pivot_is_deterministic() {
    // with m >= 2 the selected classes carry at least two images, so |M0′| = 1 needs m = n = 1
    let f = VertexMap::new(vec![0], 1).unwrap();
    let dy = dyadic(&f, 1, 0.1).unwrap();
    assert_eq!(dy.m0_prime, vec![0]);
    assert!((0..50).all(|s| compress(&f, &dy, s) == (f.clone(), Some(0))));
}

fn map_strategy() -> impl Strategy<Value = (VertexMap, f64)> {
    (any::<u64>(), 0.01f64..0.24).prop_map(|(seed, eps)| {
        let mut r = sgl_core::rng::seeded(seed);
        // a few large fibers on top of a random part
        let heavy = r.random_range(0..10);
        let values = (0..20).map(|i| if i < heavy { 9 } else { r.random_range(0..10) }).collect();
        (VertexMap::new(values, 10).unwrap(), eps)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_partitions((f, eps) in map_strategy()) {
        let r = decompose(&f, 10, eps).unwrap();
        let mut all: Vec<usize> = r.m0.iter().chain(&r.m1).chain(&r.m2).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..20).collect::<Vec<_>>());
        for &v in &r.m0 {
            prop_assert!(r.fiber_sizes[f.values[v]] as f64 <= r.threshold_low);
        }
    }

    #[test]
    fn compression_is_pointwise((f, eps) in map_strategy(), seed in any::<u64>()) {
        let dy = dyadic(&f, 10, eps).unwrap();
        prop_assert!(dy.range_ok);
        let fh = hat_f(&f, &dy);
        let (real, _) = compress(&f, &dy, seed);
        for v in 0..20 {
            if !dy.m0_double_prime.contains(&v) {
                prop_assert_eq!(fh.values[v], f.values[v]);
            }
            if !dy.m0_prime.contains(&v) {
                prop_assert_eq!(real.values[v], fh.values[v]);
            }
        }
        prop_assert!(image_bound_check(&f, &dy, 10, eps).unwrap().pass);
    }

    #[test]
    fn expectation_identity((f, eps) in map_strategy(), hs in 0u64..50) {
        let h = sample_regular_graph(10, 3, hs).unwrap();
        prop_assume!(h.is_connected());
        let g = sample_regular_graph(20, 3, hs + 1).unwrap();
        let c = expectation_identity_check(&g, &all_pairs_distances(&h), &f, eps).unwrap();
        prop_assert!(c.pass, "{:?}", c);
    }

    #[test]
    fn quotient_identity(seed in any::<u64>(), k in 2usize..12, p in 1.0f64..3.0) {
        let g = sample_regular_graph(2 * k, 3, seed).unwrap();
        let metric = all_pairs_distances(&sample_regular_graph(10, 3, seed ^ 1).unwrap());
        prop_assume!(metric.is_finite());
        let (u, pairing) = build_universal_approximator(&g, Some(&Pairing::random(k, seed))).unwrap();
        prop_assert_eq!(u.edge_count(), 3 * k);
        let points = VertexMap::random(k, 10, seed).values;
        prop_assert!(quotient_identity_check(&g, &u, &pairing, &points, &metric, p).unwrap().pass);
    }

    #[test]
    fn ratio_is_scale_invariant(seed in any::<u64>(), c in 0.1f64..10.0, p in 1.0f64..3.0) {
        let g = sample_regular_graph(8, 3, seed).unwrap();
        let metric = all_pairs_distances(&sample_regular_graph(6, 3, seed ^ 7).unwrap());
        prop_assume!(metric.is_finite());
        let f = VertexMap::random(8, 6, seed);
        if let (Ok(a), Ok(b)) = (ratio(&g, &metric, &f, p), ratio(&g, &metric.scaled(c), &f, p)) {
            prop_assert!((a - b).abs() <= 1e-9 * a);
        }
    }
}

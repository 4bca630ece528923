use kgrowth::graph_metrics::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

/// All-pairs distances by Floyd–Warshall; `None` = unreachable.
#[allow(clippy::needless_range_loop)]
fn floyd(g: &SnapshotGraph) -> Vec<Vec<Option<u32>>> {
    let n = g.node_count();
    let mut d = vec![vec![None; n]; n];
    for (s, t) in g.arcs() {
        if s != t {
            d[s as usize][t as usize] = Some(1u32);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = d[i][k] else { continue };
            for j in 0..n {
                if i == j {
                    continue;
                }
                if let Some(kj) = d[k][j] {
                    let c = ik + kj;
                    if d[i][j].is_none_or(|x| c < x) {
                        d[i][j] = Some(c);
                    }
                }
            }
        }
    }
    d
}

fn pair_distances(g: &SnapshotGraph) -> Vec<u32> {
    let d = floyd(g);
    let n = g.node_count();
    (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .filter_map(|(i, j)| d[i][j])
        .collect()
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
    (2..max_n).prop_flat_map(|n| {
        let e = prop::collection::vec((0..n as u32, 0..n as u32), 0..(3 * n));
        (Just(n), e)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_and_degree((n, e) in arb_graph(40)) {
        let e: Vec<_> = e.into_iter().filter(|(a, b)| a != b).collect();
        let g = SnapshotGraph::from_edges(n, e).unwrap();
        let d = density(&g).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((mean_degree(&g) - d * (n as f64 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn entropy_bounds((n, e) in arb_graph(40)) {
        let g = SnapshotGraph::from_edges(n, e).unwrap();
        for dir in [Direction::In, Direction::Out, Direction::Total] {
            let h = degree_entropy(&g, dir);
            prop_assert!(h >= 0.0);
            let ds = degrees(&g, dir);
            let all_equal = ds.iter().all(|&x| x == ds[0]);
            prop_assert_eq!(h == 0.0, all_equal);
            let s = normalized_structural_entropy(&g, dir).unwrap();
            prop_assert!((0.0..=1.0).contains(&s));
        }
    }

    #[test]
    fn diameter_matches_all_pairs((n, e) in arb_graph(60)) {
        let g = SnapshotGraph::from_edges(n, e).unwrap();
        let dists = pair_distances(&g);
        let exact = dists.iter().copied().max().unwrap_or(0);
        prop_assert_eq!(effective_diameter(&g, 1.0, n, 0).unwrap(), exact);
        let mean = if dists.is_empty() { 0.0 } else {
            dists.iter().map(|&x| x as f64).sum::<f64>() / dists.len() as f64
        };
        prop_assert!((avg_shortest_path(&g, n, 0).unwrap() - mean).abs() < 1e-12);
        // 90% quantile by sorting
        if !dists.is_empty() {
            let mut s = dists.clone();
            s.sort_unstable();
            let idx = ((0.9 * s.len() as f64).ceil() as usize).max(1) - 1;
            prop_assert_eq!(effective_diameter(&g, 0.9, n, 0).unwrap(), s[idx]);
        }
    }

    #[test]
    fn relabel_invariance((n, e) in arb_graph(40), seed in any::<u64>()) {
        let g = SnapshotGraph::from_edges(n, e).unwrap();
        let mut perm: Vec<u32> = (0..n as u32).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let h = g.permuted(&perm).unwrap();
        prop_assert_eq!(density(&g).unwrap(), density(&h).unwrap());
        for dir in [Direction::In, Direction::Out, Direction::Total] {
            prop_assert!((degree_entropy(&g, dir) - degree_entropy(&h, dir)).abs() < 1e-12);
        }
        prop_assert_eq!(effective_diameter(&g, 0.9, n, 0).unwrap(), effective_diameter(&h, 0.9, n, 0).unwrap());
        prop_assert!((avg_shortest_path(&g, n, 0).unwrap() - avg_shortest_path(&h, n, 0).unwrap()).abs() < 1e-12);
        if n >= 3 {
            prop_assert!((clustering_coefficient(&g).unwrap() - clustering_coefficient(&h).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn full_sample_is_exhaustive((n, e) in arb_graph(40), seed in any::<u64>()) {
        let g = SnapshotGraph::from_edges(n, e).unwrap();
        let a = distance_histogram(&g, n, seed).unwrap();
        let b = distance_histogram(&g, 10 * n, 0).unwrap();
        prop_assert!(a.exhaustive);
        prop_assert_eq!(a, b);
    }
}

/// Sampler for P(k) ∝ k^-alpha on k ≥ kmin from a tabulated CDF.
fn discrete_powerlaw(alpha: f64, kmin: u64, n: usize, seed: u64) -> Vec<u64> {
    let kmax = 1_000_000u64;
    let mut cdf = Vec::with_capacity((kmax - kmin + 1) as usize);
    let mut acc = 0.0;
    for k in kmin..=kmax {
        acc += (k as f64).powf(-alpha);
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            kmin + cdf.partition_point(|&c| c < u) as u64
        })
        .collect()
}

#[test]
fn powerlaw_recovers_cubic_law() {
    let xs = discrete_powerlaw(3.0, 5, 100_000, 11);
    let fixed = powerlaw_fit(&xs, KMin::Fixed(5)).unwrap();
    assert!((fixed.exponent - 3.0).abs() < 0.1, "{fixed:?}");
    assert_eq!(fixed.n_tail, 100_000);
    let auto = powerlaw_fit(&xs, KMin::Auto).unwrap();
    assert!((auto.exponent - 3.0).abs() < 0.1, "{auto:?}");
    assert!(auto.ks_distance < 0.02);
}

#[test]
fn powerlaw_ignores_body_below_kmin() {
    let mut xs = discrete_powerlaw(2.5, 10, 20_000, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    xs.extend((0..20_000).map(|_| rng.random_range(1..10u64)));
    let f = powerlaw_fit(&xs, KMin::Auto).unwrap();
    assert!(f.kmin >= 8 && f.kmin <= 14, "{f:?}");
    assert!((f.exponent - 2.5).abs() < 0.1, "{f:?}");
}

#[test]
fn lognormal_recovers_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = LogNormal::new(7.0, 1.0).unwrap();
    let xs: Vec<f64> = (0..100_000).map(|_| d.sample(&mut rng)).collect();
    let f = lognormal_fit(&xs).unwrap();
    assert!((f.mu - 7.0).abs() < 0.14);
    assert!((f.sigma - 1.0).abs() < 0.05);
    assert!(f.ks_distance < 0.01);

    let uni: Vec<f64> = (0..100_000).map(|_| rng.random_range(1.0..2000.0)).collect();
    assert!(lognormal_fit(&uni).unwrap().ks_distance > 5.0 * f.ks_distance);
}

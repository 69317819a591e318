use proptest::prelude::*;
use rand::Rng;

use omega_ktree::experiments::run_scaling_experiment;
use omega_ktree::metrics::{
    algorithm1, ball, bfs_distances, block_decompose, block_distance, check_dist_delta, front_distances, gh_bruteforce,
    local_metric, neighborhood,
};
use omega_ktree::samplers::{rng_for, BoltzmannSampler};
use omega_ktree::{
    phi, phi_inverse, psi, psi_inverse, CodingTree, ConditionedSampler, DiscretePmf, ExperimentConfig,
    FiniteMetricSpace, KTreeGraph, ModelParams, OmegaSet, RootMode,
};

fn params(k: usize, finite: bool) -> ModelParams {
    let omega = match (finite, k) {
        (false, _) => OmegaSet::full(),
        (true, 1) => OmegaSet::finite([0, 1, 2, 3]).unwrap(),
        (true, _) => OmegaSet::finite([0, 1, 2]).unwrap(),
    };
    ModelParams::new(k, omega).unwrap()
}

fn conditioned(k: usize, finite: bool, n: usize, seed: u64) -> CodingTree {
    let p = params(k, finite);
    let mut rng = rng_for(seed, 0);
    ConditionedSampler::new(&p, n, RootMode::Free)
        .unwrap()
        .sample_exact(&mut rng)
}

fn tree_strategy(max_n: usize) -> impl Strategy<Value = CodingTree> {
    (1usize..=3, any::<bool>(), 1..=max_n, any::<u64>()).prop_map(|(k, f, n, s)| conditioned(k, f, n, s))
}

fn space_strategy() -> impl Strategy<Value = FiniteMetricSpace> {
    (1usize..=4)
        .prop_flat_map(|n| proptest::collection::vec(1u32..=5, n * (n - 1) / 2).prop_map(move |w| (n, w)))
        .prop_map(|(n, w)| {
            let mut d = vec![vec![0.0; n]; n];
            let mut it = w.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    let x = f64::from(it.next().unwrap());
                    d[i][j] = x;
                    d[j][i] = x;
                }
            }
            for m in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        d[i][j] = f64::min(d[i][j], d[i][m] + d[m][j]);
                    }
                }
            }
            FiniteMetricSpace::new(d).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_round_trip(c in tree_strategy(40)) {
        let g = phi_inverse(&c).unwrap();
        prop_assert!(g.check_ktree().is_ok());
        prop_assert_eq!(phi(&g).unwrap().normalized(), c.normalized());
    }

    #[test]
    fn psi_round_trip(c in tree_strategy(40)) {
        let plane = psi_inverse(&c);
        prop_assert_eq!(plane.len(), c.k() * c.size() + 1);
        let back = psi(&plane, c.k()).unwrap();
        prop_assert_eq!(back.shape_code(), c.shape_code());
        prop_assert_eq!(psi_inverse(&back), plane);
    }

    #[test]
    fn ktree_counts(c in tree_strategy(40)) {
        let (k, n) = (c.k(), c.size());
        let g = phi_inverse(&c).unwrap();
        prop_assert_eq!(g.vertex_count(), n + k);
        prop_assert_eq!(g.edge_count(), k * (k - 1) / 2 + n * k);
        prop_assert_eq!(g.count_k_cliques(), k * n + 1);
    }

    #[test]
    fn algorithm1_matches_bfs(c in tree_strategy(60)) {
        let dt = algorithm1(&c);
        let bfs = bfs_distances(&phi_inverse(&c).unwrap(), 1);
        for v in 1..=c.size() + c.k() {
            prop_assert_eq!(dt.vertex(v) as usize, bfs[v]);
        }
    }

    #[test]
    fn distance_exceeds_block_distance_by_at_most_three(c in tree_strategy(60)) {
        let g = phi_inverse(&c).unwrap();
        let bd = block_decompose(&c, &algorithm1(&c));
        prop_assert!(check_dist_delta(&g, &c, &bd).is_ok());
    }

    #[test]
    fn blocks_partition_blacks(c in tree_strategy(60)) {
        let bd = block_decompose(&c, &algorithm1(&c));
        prop_assert_eq!(bd.sizes().iter().sum::<usize>(), c.size());
        let good = c.black_nodes().filter(|&b| bd.is_good(b)).count();
        prop_assert_eq!(bd.good_counts().iter().sum::<usize>(), good);
        let blacks: Vec<usize> = c.black_nodes().collect();
        for &x in blacks.iter().take(6) {
            prop_assert_eq!(block_distance(&bd, x, x), 0);
            for &y in blacks.iter().take(6) {
                prop_assert_eq!(block_distance(&bd, x, y), block_distance(&bd, y, x));
                for &z in blacks.iter().take(6) {
                    prop_assert!(block_distance(&bd, x, z) <= block_distance(&bd, x, y) + block_distance(&bd, y, z));
                }
            }
        }
    }

    #[test]
    fn balls_grow_to_the_whole_graph(c in tree_strategy(30)) {
        let g = phi_inverse(&c).unwrap();
        let ecc = front_distances(&g).into_iter().filter(|&d| d != usize::MAX).max().unwrap();
        let mut last = 0;
        for ell in 0..=ecc + 1 {
            let b = ball(&g, ell);
            prop_assert!(b.vertex_count() >= last);
            last = b.vertex_count();
        }
        prop_assert_eq!(last, g.vertex_count());
        prop_assert_eq!(neighborhood(&g, ecc).unwrap(), neighborhood(&g, ecc + 3).unwrap());
    }

    #[test]
    fn local_metric_is_symmetric(a in tree_strategy(12), b in tree_strategy(12)) {
        let (ga, gb) = (phi_inverse(&a).unwrap(), phi_inverse(&b).unwrap());
        let ab = local_metric(&ga, &gb, 3).unwrap();
        let ba = local_metric(&gb, &ga, 3).unwrap();
        prop_assert_eq!(ab.value, ba.value);
        prop_assert!(local_metric(&ga, &ga, 3).unwrap().saturated);
    }

    #[test]
    fn text_formats_round_trip(c in tree_strategy(30)) {
        let g = phi_inverse(&c).unwrap();
        prop_assert_eq!(KTreeGraph::from_edge_list(&g.to_edge_list()).unwrap(), g);
        prop_assert_eq!(CodingTree::from_json(&c.to_json()).unwrap().normalized(), c.normalized());
    }

    #[test]
    fn gh_is_symmetric_with_zero_diagonal(x in space_strategy(), y in space_strategy()) {
        let xy = gh_bruteforce(&x, &y).unwrap();
        prop_assert!((xy - gh_bruteforce(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert_eq!(gh_bruteforce(&x, &x).unwrap(), 0.0);
        // Diameters bound the distance from both sides.
        prop_assert!(xy >= (x.diameter() - y.diameter()).abs() / 2.0 - 1e-12);
        prop_assert!(xy <= x.diameter().max(y.diameter()) / 2.0 + 1e-12);
        let to_point = gh_bruteforce(&x, &FiniteMetricSpace::point()).unwrap();
        prop_assert!((to_point - x.diameter() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_operations_preserve_mass(w in proptest::collection::vec(0.0f64..1.0, 1..6), times in 1usize..5) {
        prop_assume!(w.iter().sum::<f64>() > 1e-3 && w[1..].iter().sum::<f64>() > 1e-3);
        let p = DiscretePmf::from_weights(w).unwrap();
        let q = p.convolution_power(times);
        prop_assert!((q.total() - 1.0).abs() < 1e-9);
        prop_assert!((q.mean() - times as f64 * p.mean()).abs() < 1e-9);
        let biased = p.size_bias().unwrap();
        prop_assert!((biased.mean() - (p.variance() + p.mean() * p.mean()) / p.mean()).abs() < 1e-9);
    }

    #[test]
    fn boltzmann_trees_are_valid(k in 1usize..=3, finite in any::<bool>(), seed in any::<u64>()) {
        let p = params(k, finite);
        let s = BoltzmannSampler::new(&p);
        let mut rng = rng_for(seed, 1);
        if let Some(t) = s.try_sample_c(&mut rng, 500) {
            prop_assert!(t.validate(&p.omega).is_ok());
        }
        if let Some(t) = s.try_sample_b(&mut rng, 500) {
            prop_assert!(t.validate(&p.omega).is_ok());
            prop_assert!(t.is_reduced());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn experiments_are_reproducible(seed in any::<u64>(), n in 5usize..40) {
        let cfg = ExperimentConfig {
            ns: vec![n],
            replicates: 6,
            seed,
            ..ExperimentConfig::default()
        };
        let a = run_scaling_experiment(&cfg).unwrap();
        let b = run_scaling_experiment(&cfg).unwrap();
        let key = |o: &omega_ktree::experiments::ScalingOutput| {
            o.rows.iter().map(|r| (r.replicate, r.stat.clone(), r.value.to_bits())).collect::<Vec<_>>()
        };
        prop_assert_eq!(key(&a), key(&b));
    }

    #[test]
    fn sampler_streams_differ_by_seed(seed in any::<u64>()) {
        let mut a = rng_for(seed, 0);
        let mut b = rng_for(seed, 1);
        let xa: Vec<u64> = (0..4).map(|_| a.gen()).collect();
        let xb: Vec<u64> = (0..4).map(|_| b.gen()).collect();
        prop_assert_ne!(xa, xb);
    }
}

//! Cross-checks of closed forms and samplers against independent oracles.

use std::collections::{HashMap, HashSet};

use rand::Rng;

use omega_ktree::experiments::{run_scaling_experiment, ModelSpec};
use omega_ktree::metrics::{algorithm1, bfs_distances, block_decompose, block_distance};
use omega_ktree::samplers::deficit::{deficit_from_sequence, deficit_of_tree};
use omega_ktree::samplers::{
    exact_small_reduced, exact_small_sampler, rng_for, BoltzmannSampler, KestenSampler, PlainGrowth, SizeBiasedSampler,
};
use omega_ktree::series::{labelled_counts, subexponential_ratio, to_f64_lossy, unlabeled_counts};
use omega_ktree::stats::{chi_square_gof, chi_square_two_sample};
use omega_ktree::{phi_inverse, ConditionedSampler, ExperimentConfig, ModelParams, OmegaSet, RootMode, Strategy};

fn full(k: usize) -> ModelParams {
    ModelParams::new(k, OmegaSet::full()).unwrap()
}

fn small(k: usize) -> ModelParams {
    ModelParams::new(k, OmegaSet::finite([0, 1, 2]).unwrap()).unwrap()
}

#[test]
fn enumeration_sizes_match_series() {
    for p in [full(1), full(2), small(2), small(3)] {
        let counts = labelled_counts(p.k, &p.omega, 4);
        for n in 1..=4 {
            let all = exact_small_sampler(&p, n).unwrap();
            assert_eq!(
                all.len().to_string(),
                counts.c[n].to_string(),
                "k={} {} n={n}",
                p.k,
                p.omega
            );
            let keys: HashSet<String> = all.iter().map(|t| t.labelled_key()).collect();
            assert_eq!(keys.len(), all.len());
        }
    }
    assert_eq!(exact_small_sampler(&full(2), 2).unwrap().len(), 5);
    assert_eq!(exact_small_sampler(&full(1), 3).unwrap().len(), 16);
}

#[test]
fn unlabeled_counts_match_distinct_shapes() {
    let k1 = unlabeled_counts(1, &OmegaSet::full(), 5).unwrap();
    let got: Vec<String> = k1.rooted.coeffs.iter().map(|x| x.to_string()).collect();
    assert_eq!(got, ["1", "1", "2", "4", "9", "20"]);
    for (k, max_n) in [(1usize, 5usize), (2, 4)] {
        let u = unlabeled_counts(k, &OmegaSet::full(), max_n).unwrap();
        for n in 1..=max_n {
            let shapes: HashSet<Vec<u8>> = exact_small_sampler(&full(k), n)
                .unwrap()
                .iter()
                .map(|t| t.shape_code())
                .collect();
            assert_eq!(shapes.len().to_string(), u.rooted.coeffs[n].to_string(), "k={k} n={n}");
        }
    }
}

#[test]
fn ratio_flattens_towards_stirling_constant() {
    let r = subexponential_ratio(&full(1), 128);
    let target = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    assert!((r[50] - target).abs() < 0.01 * target, "r(50) = {}", r[50]);
    for big in [32usize, 64] {
        assert!((r[2 * big] - r[big]).abs() < (r[big] - r[big / 2]).abs());
    }
}

#[test]
fn boltzmann_size_laws() {
    let p = small(2);
    let s = BoltzmannSampler::new(&p);
    let mut rng = rng_for(21, 0);
    let draws = 100_000;
    let ones = (0..draws).filter(|_| s.size_b(&mut rng, 1) == Some(1)).count() as f64 / draws as f64;
    let se = (0.25f64 * 0.75 / draws as f64).sqrt();
    assert!((ones - 0.25).abs() < 3.0 * se, "P[size = 1] = {ones}");

    // Unreduced draws: size law c(n) ρⁿ / (n! C(ρ)).
    let counts = labelled_counts(p.k, &p.omega, 5);
    let mut sizes = [0u64; 6];
    for _ in 0..draws {
        if let Some(n) = s.size_c(&mut rng, 5) {
            sizes[n] += 1;
        }
    }
    let mut fact = 1.0;
    for n in 0..=5 {
        if n > 0 {
            fact *= n as f64;
        }
        let want = to_f64_lossy(&counts.c[n]) * p.rho.powi(n as i32) / (fact * p.c_rho);
        let got = sizes[n] as f64 / draws as f64;
        let se = (want * (1.0 - want) / draws as f64).sqrt();
        assert!((got - want).abs() < 3.0 * se, "n={n}: {got} vs {want}");
    }
}

#[test]
fn kesten_root_degree_is_size_biased() {
    let p = full(2);
    let s = KestenSampler::new(&p);
    let want = p.plane_root_law().size_bias().unwrap();
    let mut rng = rng_for(22, 0);
    let draws = 100_000;
    let mut counts = vec![0u64; 64];
    for _ in 0..draws {
        counts[s.plane(1, &mut rng).tree.outdegree(0).min(63)] += 1;
    }
    let tv: f64 = (0..64)
        .map(|d| (counts[d] as f64 / draws as f64 - want.prob(d)).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv <= 0.01, "TV {tv}");
}

#[test]
fn k1_root_degree_follows_cayley() {
    // Root degree of a uniform labelled tree on m vertices is 1 + Bin(m − 2, 1/m).
    let n = 8;
    let m = n + 1;
    let s = ConditionedSampler::new(&full(1), n, RootMode::Free).unwrap();
    let mut rng = rng_for(23, 0);
    let draws = 100_000;
    let mut counts = vec![0u64; n + 1];
    for _ in 0..draws {
        let t = s.sample_exact(&mut rng);
        counts[t.children(t.root()).len()] += 1;
    }
    let q = 1.0 / m as f64;
    let mut binom = 1.0;
    let mut expected = vec![0.0; n + 1];
    for j in 0..=m - 2 {
        if j > 0 {
            binom *= (m - 2 - j + 1) as f64 / j as f64;
        }
        expected[j + 1] = binom * q.powi(j as i32) * (1.0 - q).powi((m - 2 - j) as i32);
    }
    // Pool the sparse upper tail into one cell.
    let cut = 5;
    let mut obs: Vec<u64> = counts[1..cut].to_vec();
    obs.push(counts[cut..].iter().sum());
    let mut exp: Vec<f64> = expected[1..cut].to_vec();
    exp.push(expected[cut..].iter().sum());
    let r = chi_square_gof(&obs, &exp);
    assert!(r.p_value > 1e-3, "{r:?}");
}

#[test]
fn k1_distance_equals_block_distance_on_ancestor_lines() {
    let s = ConditionedSampler::new(&full(1), 120, RootMode::Free).unwrap();
    let mut rng = rng_for(24, 0);
    for _ in 0..20 {
        let c = s.sample_exact(&mut rng);
        let g = phi_inverse(&c).unwrap();
        let bd = block_decompose(&c, &algorithm1(&c));
        for y in c.black_nodes() {
            let dist = bfs_distances(&g, c.label(y));
            // Black ancestors sit two levels up in the coding tree.
            let mut x = y;
            while let Some(up) = c.parent(x).and_then(|w| c.parent(w)) {
                x = up;
                assert_eq!(dist[c.label(x)], block_distance(&bd, x, y));
            }
        }
    }
}

#[test]
fn deficit_law_agrees_across_strategies() {
    let p = full(1);
    let n = 100;
    let s = ConditionedSampler::new(&p, n, RootMode::Free).unwrap();
    let mut rng = rng_for(25, 0);
    let draws = 2_000;
    let bin = |d: usize| d.min(6);
    let mut a = vec![0u64; 7];
    let mut b = vec![0u64; 7];
    for _ in 0..draws {
        a[bin(deficit_from_sequence(&s.sample_white_sequence(&mut rng), 1))] += 1;
        b[bin(deficit_of_tree(&s.sample(&mut rng, Strategy::Rejection).unwrap()))] += 1;
    }
    let r = chi_square_two_sample(&a, &b);
    assert!(r.p_value > 1e-3, "{r:?}");
}

#[test]
fn rescaled_mean_stabilizes() {
    let cfg = ExperimentConfig {
        models: vec![ModelSpec::new(2, OmegaSet::full())],
        ns: vec![1000, 2000, 5000],
        replicates: 1000,
        seed: 26,
        stats: vec!["root_to_uniform".into()],
        ..ExperimentConfig::default()
    };
    let out = run_scaling_experiment(&cfg).unwrap();
    let means: Vec<f64> = out.summary.iter().map(|r| r.mean_rescaled.unwrap()).collect();
    assert_eq!(means.len(), 3);
    for w in means.windows(2) {
        assert!((w[1] - w[0]).abs() < 0.05 * w[0], "{means:?}");
    }
}

#[test]
fn uniform_draws_cover_all_trees() {
    let p = small(2);
    let all = exact_small_sampler(&p, 3).unwrap();
    let keys: HashSet<String> = all.iter().map(|t| t.labelled_key()).collect();
    let s = ConditionedSampler::new(&p, 3, RootMode::Free).unwrap();
    let mut rng = rng_for(27, 0);
    let mut seen = HashSet::new();
    for _ in 0..20 * all.len() {
        let strategy = if rng.gen() {
            Strategy::Exact
        } else {
            Strategy::Rejection
        };
        let t = s.sample(&mut rng, strategy).unwrap();
        let key = t.labelled_key();
        assert!(keys.contains(&key));
        seen.insert(key);
    }
    assert_eq!(seen.len(), keys.len());
}

#[test]
fn size_biased_trees_are_weighted_by_root_block_heirs() {
    // A pair (tree, spine) has the Boltzmann weight of the tree, so at a fixed
    // size each tree appears in proportion to the good blacks of its root block.
    let p = small(2);
    let n = 3;
    let all = exact_small_reduced(&p, n).unwrap();
    let weights: Vec<f64> = all
        .iter()
        .map(|t| {
            let bd = block_decompose(t, &algorithm1(t));
            bd.good_counts()[bd.block_of(t.children(t.root())[0])] as f64
        })
        .collect();
    assert!(weights.iter().any(|&w| w != weights[0]), "weights are not uniform");
    let total: f64 = weights.iter().sum();
    let expected: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let index: HashMap<String, usize> = all.iter().enumerate().map(|(i, t)| (t.labelled_key(), i)).collect();

    let s = SizeBiasedSampler::new(&p);
    let mut rng = rng_for(28, 0);
    let mut counts = vec![0u64; all.len()];
    let mut kept = 0;
    while kept < 50_000 {
        let growth = PlainGrowth::Full { max_black: n };
        if let Some(t) = s.sample(1, growth, &mut rng).filter(|t| t.tree.size() == n) {
            counts[index[&t.tree.labelled_key()]] += 1;
            kept += 1;
        }
    }
    let r = chi_square_gof(&counts, &expected);
    assert!(r.p_value > 1e-3, "{r:?}");
}

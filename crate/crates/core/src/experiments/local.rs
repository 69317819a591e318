//! Local limit checks: truncated plane trees and balls of conditioned
//! samples against the Kesten tree.
//!
//! For the height-2 truncation the finite-size probability of a shape
//! depends only on the root degree `D1` and the number `D` of grandchildren:
//! it is the Kesten probability times
//! `Eη · P(S_M = M − D) / (M · P(|T| = kn + 1))` with `M = kn − D1`,
//! where `S_M` sums `M` plane offspring variables. This gives the exact total
//! variation distance at any `n`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::{replicate_rng, ExperimentConfig, ExperimentError, StatRow};
use crate::metrics::{ktree_code, neighborhood_from_coding};
use crate::model::ModelParams;
use crate::pmf::log_power_probs;
use crate::samplers::{ConditionedSampler, KestenSampler, RootMode};
use crate::stats::{frequencies, tv_tables, tv_to_law};
use crate::trees::{psi, PlaneTree};

/// Probabilities of `(root degree, grandchildren)` classes.
pub type ClassLaw = BTreeMap<(usize, usize), f64>;

/// One canonical code per requested height or radius.
type Codes = Vec<Vec<u8>>;

/// Kesten balls larger than this are redrawn.
const KESTEN_BALL_CAP: usize = 1_000_000;

pub fn root_degree_class(t: &PlaneTree) -> usize {
    t.outdegree(0)
}

pub fn truncated2_class(t: &PlaneTree) -> (usize, usize) {
    let d1 = t.outdegree(0);
    let d = t.children(0).iter().map(|&v| t.outdegree(v)).sum();
    (d1, d)
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn root_support(params: &ModelParams, n: usize) -> Vec<(usize, f64)> {
    let root = params.root_law();
    root.support()
        .filter(|&i| i >= 1 && i <= n)
        .map(|i| (i, root.prob(i)))
        .collect()
}

/// Exact class law of the height-2 truncation of the conditioned plane tree
/// with `kn + 1` vertices.
pub fn finite_class_law(params: &ModelParams, n: usize) -> ClassLaw {
    let k = params.k;
    let white = params.offspring_white();
    let w = white.probs();
    let lp = log_power_probs(w, k * n, n);
    let roots = root_support(params, n);
    let ln_total = log_sum_exp(
        &roots
            .iter()
            .map(|&(i, r)| r.ln() + (i as f64 / n as f64).ln() + lp[n - i])
            .collect::<Vec<_>>(),
    );
    let mut law = ClassLaw::new();
    for &(i, r) in &roots {
        let rest = n - i;
        let children = log_power_probs(w, k * i, rest);
        if rest == 0 {
            law.insert((k * i, 0), (r.ln() + children[0] - ln_total).exp());
            continue;
        }
        let m = k * rest;
        let forest = log_power_probs(w, m, rest);
        for j in 1..=rest {
            let ln_p = r.ln() + children[j] + ((k * j) as f64 / m as f64).ln() + forest[rest - j] - ln_total;
            let p = ln_p.exp();
            if p > 0.0 {
                law.insert((k * i, k * j), p);
            }
        }
    }
    law
}

/// Class law of the height-2 truncation of the Kesten tree, for grandchild
/// counts up to `k · jmax`.
pub fn kesten_class_law(params: &ModelParams, jmax: usize) -> ClassLaw {
    let k = params.k;
    let white = params.offspring_white();
    let root = params.root_law();
    let mean_root = root.mean();
    let mut law = ClassLaw::new();
    for i in root.support().filter(|&i| i >= 1) {
        let r = root.prob(i);
        let children = log_power_probs(white.probs(), k * i, jmax);
        for (j, &lc) in children.iter().enumerate().take(jmax + 1).skip(1) {
            let p = (r.ln() + lc).exp() * j as f64 / mean_root;
            if p > 0.0 {
                law.insert((k * i, k * j), p);
            }
        }
    }
    law
}

fn tv_laws(a: &ClassLaw, b: &ClassLaw) -> f64 {
    let mut sum = 0.0;
    for (key, &p) in a {
        sum += (p - b.get(key).copied().unwrap_or(0.0)).abs();
    }
    for (key, &q) in b {
        if !a.contains_key(key) {
            sum += q;
        }
    }
    // Mass missing from a table lies where the other law vanishes.
    let missing = |law: &ClassLaw| (1.0 - law.values().sum::<f64>()).max(0.0);
    (sum + missing(a) + missing(b)) / 2.0
}

/// Exact total variation between the height-2 truncations of the conditioned
/// tree and the Kesten tree.
pub fn exact_truncated2_tv(params: &ModelParams, n: usize) -> f64 {
    tv_laws(&finite_class_law(params, n), &kesten_class_law(params, n))
}

/// Exact total variation between the root degree of the conditioned tree
/// and the size-biased root law.
pub fn exact_root_degree_tv(params: &ModelParams, n: usize) -> f64 {
    let collapse = |law: &ClassLaw| {
        let mut out: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (&(d1, _), &p) in law {
            *out.entry((d1, 0)).or_insert(0.0) += p;
        }
        out
    };
    tv_laws(
        &collapse(&finite_class_law(params, n)),
        &collapse(&kesten_class_law(params, n)),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalSummaryRow {
    pub model: String,
    pub n: usize,
    pub observable: String,
    pub tv_empirical: f64,
    pub tv_exact: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalOutput {
    pub rows: Vec<StatRow>,
    pub summary: Vec<LocalSummaryRow>,
}

struct FiniteDraw {
    root_degree: usize,
    trees: Vec<Vec<u8>>,
    balls: Vec<Vec<u8>>,
}

/// Frequency tables of truncated trees and balls from conditioned samples
/// and from Kesten samples, compared in total variation.
pub fn run_local_experiment(cfg: &ExperimentConfig) -> Result<LocalOutput, ExperimentError> {
    let models = cfg.validate()?;
    let hmax = cfg.heights.iter().copied().max().unwrap_or(0);
    let mut out = LocalOutput {
        rows: Vec::new(),
        summary: Vec::new(),
    };
    for (mi, params) in models.iter().enumerate() {
        let spec = &cfg.models[mi];
        let name = spec.to_string();
        let kesten = KestenSampler::new(params);
        // Kesten draws do not depend on n; they use the stream of size 0.
        let limit: Vec<(Codes, Codes)> = (0..cfg.replicates)
            .into_par_iter()
            .map(|rep| {
                let mut rng = replicate_rng(cfg.seed, mi, 0, rep);
                let t = kesten.plane(hmax, &mut rng).tree;
                let trees = cfg.heights.iter().map(|&h| t.truncate(h).canonical_code()).collect();
                let balls = cfg
                    .radii
                    .iter()
                    .map(|&ell| loop {
                        if let Some(u) = kesten.neighborhood(ell, KESTEN_BALL_CAP, &mut rng) {
                            break ktree_code(&u);
                        }
                    })
                    .collect();
                (trees, balls)
            })
            .collect();
        let eta_hat: BTreeMap<usize, f64> = {
            let law = params.plane_root_law().size_bias().expect("root law has positive mean");
            law.support().map(|d| (d, law.prob(d))).collect()
        };
        for &n in &cfg.ns {
            let sampler = ConditionedSampler::new(params, n, RootMode::Free)?;
            let draws: Vec<FiniteDraw> = (0..cfg.replicates)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = replicate_rng(cfg.seed, mi, n, rep);
                    let plane = sampler.sample_plane(&mut rng);
                    let coding = psi(&plane, params.k).expect("outdegrees are multiples of k");
                    FiniteDraw {
                        root_degree: root_degree_class(&plane),
                        trees: cfg
                            .heights
                            .iter()
                            .map(|&h| plane.truncate(h).canonical_code())
                            .collect(),
                        balls: cfg
                            .radii
                            .iter()
                            .map(|&ell| neighborhood_from_coding(&coding, ell))
                            .collect(),
                    }
                })
                .collect();
            for (rep, d) in draws.iter().enumerate() {
                out.rows.push(StatRow {
                    experiment: "local".into(),
                    k: spec.k,
                    omega: spec.omega.to_string(),
                    n,
                    seed: cfg.seed,
                    replicate: rep as u64,
                    stat: "root_degree".into(),
                    value: d.root_degree as f64,
                    rescaled: None,
                });
            }
            let degrees = frequencies(draws.iter().map(|d| d.root_degree));
            let tv = tv_to_law(&degrees, &eta_hat);
            out.summary.push(LocalSummaryRow {
                model: name.clone(),
                n,
                observable: "root_degree".into(),
                tv_empirical: tv,
                tv_exact: Some(exact_root_degree_tv(params, n)),
                pass: tv <= cfg.tv_max,
            });
            for (hi, &h) in cfg.heights.iter().enumerate() {
                let a: HashMap<Vec<u8>, u64> = frequencies(draws.iter().map(|d| d.trees[hi].clone()));
                let b = frequencies(limit.iter().map(|l| l.0[hi].clone()));
                let tv = tv_tables(&a, &b);
                let exact = match h {
                    0 => Some(0.0),
                    1 => Some(exact_root_degree_tv(params, n)),
                    2 => Some(exact_truncated2_tv(params, n)),
                    _ => None,
                };
                out.summary.push(LocalSummaryRow {
                    model: name.clone(),
                    n,
                    observable: format!("tree_h{h}"),
                    tv_empirical: tv,
                    tv_exact: exact,
                    pass: tv <= cfg.tv_max,
                });
            }
            for (li, &ell) in cfg.radii.iter().enumerate() {
                let a = frequencies(draws.iter().map(|d| d.balls[li].clone()));
                let b = frequencies(limit.iter().map(|l| l.1[li].clone()));
                let tv = tv_tables(&a, &b);
                out.summary.push(LocalSummaryRow {
                    model: name.clone(),
                    n,
                    observable: format!("ball_l{ell}"),
                    tv_empirical: tv,
                    tv_exact: None,
                    pass: tv <= cfg.tv_max,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OmegaSet;
    use crate::samplers::exact_small_sampler;
    use crate::trees::psi_inverse;

    #[test]
    fn finite_law_matches_enumeration() {
        for (k, omega) in [
            (2, OmegaSet::finite([0, 1, 2]).unwrap()),
            (1, OmegaSet::full()),
            (2, OmegaSet::full()),
        ] {
            let p = ModelParams::new(k, omega).unwrap();
            let n = 5;
            let all = exact_small_sampler(&p, n).unwrap();
            let law = finite_class_law(&p, n);
            let counts = frequencies(all.iter().map(|t| truncated2_class(&psi_inverse(t))));
            for (key, &c) in &counts {
                let want = law.get(key).copied().unwrap_or(0.0);
                assert!((c as f64 / all.len() as f64 - want).abs() < 1e-9, "k={k} {key:?}");
            }
            assert!((law.values().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn kesten_law_is_a_distribution_and_matches_sampler() {
        let p = ModelParams::new(2, OmegaSet::finite([0, 1, 2]).unwrap()).unwrap();
        let law = kesten_class_law(&p, 60);
        assert!((law.values().sum::<f64>() - 1.0).abs() < 1e-9);
        let s = KestenSampler::new(&p);
        let mut rng = crate::samplers::rng_for(4, 0);
        let draws = 20_000;
        let counts = frequencies((0..draws).map(|_| truncated2_class(&s.plane(2, &mut rng).tree)));
        let tv = tv_to_law(&counts, &law);
        assert!(tv < 0.03, "tv {tv}");
    }

    #[test]
    fn exact_tv_shrinks() {
        let p = ModelParams::new(2, OmegaSet::finite([0, 1, 2]).unwrap()).unwrap();
        let a = exact_truncated2_tv(&p, 100);
        let b = exact_truncated2_tv(&p, 400);
        assert!(b < a && a < 0.1, "{a} {b}");
    }
}

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{replicate_rng, ExperimentConfig, ExperimentError, StatRow};
use crate::metrics::{algorithm1, graph_stats};
use crate::model::ModelParams;
use crate::samplers::{ConditionedSampler, RootMode, Strategy};
use crate::stats::{ks_two_sample, mean, std_dev};
use crate::trees::{black_tree, phi_inverse};

/// Raw statistics of one conditioned tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingSample {
    pub root_to_uniform: usize,
    pub uniform_pair: Option<usize>,
    pub diameter: Option<usize>,
    pub black_height: Option<usize>,
}

const DISTANCE_STATS: [&str; 3] = ["root_to_uniform", "uniform_pair", "diameter"];

/// Samples one tree and measures the selected statistics. The distance from
/// vertex 1 to a uniform vertex comes from front sequences; the others need
/// the graph.
pub fn scaling_sample<R: Rng + ?Sized>(
    sampler: &ConditionedSampler,
    strategy: Strategy,
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<ScalingSample, ExperimentError> {
    let c = sampler.sample(rng, strategy)?;
    let dt = algorithm1(&c);
    let vertices = c.size() + c.k();
    let root_to_uniform = dt.vertex(rng.gen_range(1..=vertices)) as usize;
    let need_graph = cfg.wants("uniform_pair") || cfg.wants("diameter");
    let (uniform_pair, diameter) = if need_graph {
        let g = phi_inverse(&c).expect("sampled coding trees are valid");
        let s = graph_stats(&g, cfg.diameter_sources, rng);
        (
            cfg.wants("uniform_pair").then_some(s.uniform_pair),
            cfg.wants("diameter").then_some(s.diameter),
        )
    } else {
        (None, None)
    };
    let black_height = cfg.wants("black_height").then(|| black_tree(&c).tree.height());
    Ok(ScalingSample {
        root_to_uniform,
        uniform_pair,
        diameter,
        black_height,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingSummaryRow {
    pub model: String,
    pub n: usize,
    pub stat: String,
    pub mean: f64,
    pub sd: f64,
    pub mean_rescaled: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KsRow {
    pub n: usize,
    pub stat: String,
    pub model_a: String,
    pub model_b: String,
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingOutput {
    pub rows: Vec<StatRow>,
    pub summary: Vec<ScalingSummaryRow>,
    pub ks: Vec<KsRow>,
}

impl ScalingOutput {
    /// Rescaled values of one statistic for model index `model` at size `n`.
    pub fn rescaled(&self, model: &str, n: usize, stat: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.omega_model() == model && r.n == n && r.stat == stat)
            .filter_map(|r| r.rescaled)
            .collect()
    }
}

impl StatRow {
    fn omega_model(&self) -> String {
        format!("{}:{}", self.k, self.omega)
    }
}

/// Conditioned trees for every model, size and replicate; summaries per
/// statistic and pairwise two-sample KS tests of rescaled distances across
/// models at each size.
pub fn run_scaling_experiment(cfg: &ExperimentConfig) -> Result<ScalingOutput, ExperimentError> {
    let models = cfg.validate()?;
    let mut rows = Vec::new();
    for (mi, params) in models.iter().enumerate() {
        for &n in &cfg.ns {
            rows.extend(scaling_rows(cfg, mi, params, n)?);
        }
    }
    let mut out = ScalingOutput {
        rows,
        summary: Vec::new(),
        ks: Vec::new(),
    };
    let stats = ["root_to_uniform", "uniform_pair", "diameter", "black_height"];
    for spec in &cfg.models {
        let name = spec.to_string();
        for &n in &cfg.ns {
            for stat in stats.iter().filter(|s| cfg.wants(s)) {
                let raw: Vec<f64> = out
                    .rows
                    .iter()
                    .filter(|r| r.omega_model() == name && r.n == n && r.stat == *stat)
                    .map(|r| r.value)
                    .collect();
                let rescaled = out.rescaled(&name, n, stat);
                out.summary.push(ScalingSummaryRow {
                    model: name.clone(),
                    n,
                    stat: stat.to_string(),
                    mean: mean(&raw),
                    sd: std_dev(&raw),
                    mean_rescaled: (!rescaled.is_empty()).then(|| mean(&rescaled)),
                });
            }
        }
    }
    for &n in &cfg.ns {
        for stat in DISTANCE_STATS.iter().filter(|s| cfg.wants(s)) {
            for (i, a) in cfg.models.iter().enumerate() {
                for b in &cfg.models[i + 1..] {
                    let (a, b) = (a.to_string(), b.to_string());
                    let r = ks_two_sample(&out.rescaled(&a, n, stat), &out.rescaled(&b, n, stat));
                    out.ks.push(KsRow {
                        n,
                        stat: stat.to_string(),
                        model_a: a,
                        model_b: b,
                        statistic: r.statistic,
                        p_value: r.p_value,
                        pass: r.p_value > cfg.alpha,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn scaling_rows(
    cfg: &ExperimentConfig,
    mi: usize,
    params: &ModelParams,
    n: usize,
) -> Result<Vec<StatRow>, ExperimentError> {
    let sampler = ConditionedSampler::new(params, n, RootMode::Free)?;
    let scale = params.scale(n);
    let spec = &cfg.models[mi];
    let samples: Vec<ScalingSample> = (0..cfg.replicates)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replicate_rng(cfg.seed, mi, n, rep);
            scaling_sample(&sampler, cfg.strategy, cfg, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for (rep, s) in samples.iter().enumerate() {
        let mut push = |stat: &str, value: Option<usize>, distance: bool| {
            if let Some(v) = value {
                rows.push(StatRow {
                    experiment: "scaling".into(),
                    k: spec.k,
                    omega: spec.omega.to_string(),
                    n,
                    seed: cfg.seed,
                    replicate: rep as u64,
                    stat: stat.into(),
                    value: v as f64,
                    rescaled: distance.then_some(v as f64 * scale),
                });
            }
        };
        if cfg.wants("root_to_uniform") {
            push("root_to_uniform", Some(s.root_to_uniform), true);
        }
        push("uniform_pair", s.uniform_pair, true);
        push("diameter", s.diameter, true);
        push("black_height", s.black_height, false);
    }
    Ok(rows)
}

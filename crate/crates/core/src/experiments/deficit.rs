use rayon::prelude::*;
use serde::Serialize;

use super::{replicate_rng, ExperimentConfig, ExperimentError, StatRow};
use crate::samplers::deficit::{deficit_from_sequence, deficit_tail};
use crate::samplers::{ConditionedSampler, RootMode};

/// Smallest integer `t ≥ n^ε`.
pub fn deficit_threshold(n: usize, epsilon: f64) -> usize {
    let x = (n as f64).powf(epsilon);
    let t = x.round();
    if (x - t).abs() < 1e-9 {
        t as usize
    } else {
        x.ceil() as usize
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeficitSummaryRow {
    pub model: String,
    pub n: usize,
    pub threshold: usize,
    pub replicates: usize,
    pub exceed_fraction: f64,
    /// Exact `P(deficit ≥ threshold)` when the threshold is below `n/2`.
    pub exact_tail: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeficitOutput {
    pub rows: Vec<StatRow>,
    pub summary: Vec<DeficitSummaryRow>,
}

/// Deficit `n − L` of the largest root component for every replicate, with
/// the fraction of samples at or above `n^ε`.
pub fn run_deficit_experiment(cfg: &ExperimentConfig) -> Result<DeficitOutput, ExperimentError> {
    let models = cfg.validate()?;
    let mut out = DeficitOutput {
        rows: Vec::new(),
        summary: Vec::new(),
    };
    for (mi, params) in models.iter().enumerate() {
        let spec = &cfg.models[mi];
        for &n in &cfg.ns {
            let sampler = ConditionedSampler::new(params, n, RootMode::Free)?;
            let deficits: Vec<usize> = (0..cfg.replicates)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = replicate_rng(cfg.seed, mi, n, rep);
                    deficit_from_sequence(&sampler.sample_white_sequence(&mut rng), params.k)
                })
                .collect();
            let t = deficit_threshold(n, cfg.epsilon);
            let exceed = deficits.iter().filter(|&&d| d >= t).count();
            for (rep, &d) in deficits.iter().enumerate() {
                out.rows.push(StatRow {
                    experiment: "deficit".into(),
                    k: spec.k,
                    omega: spec.omega.to_string(),
                    n,
                    seed: cfg.seed,
                    replicate: rep as u64,
                    stat: "deficit".into(),
                    value: d as f64,
                    rescaled: None,
                });
            }
            out.summary.push(DeficitSummaryRow {
                model: spec.to_string(),
                n,
                threshold: t,
                replicates: cfg.replicates,
                exceed_fraction: exceed as f64 / cfg.replicates as f64,
                exact_tail: (2 * t <= n).then(|| deficit_tail(params, n, t)),
            });
        }
    }
    Ok(out)
}

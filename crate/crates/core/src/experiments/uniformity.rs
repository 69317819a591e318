use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{replicate_rng, ExperimentConfig, ExperimentError};
use crate::model::ModelParams;
use crate::samplers::{exact_small_sampler, ConditionedSampler, RootMode, Strategy};
use crate::stats::{chi_square_gof, chi_square_two_sample};

/// Offset separating the streams of the two strategies.
const REJECTION_STREAM: usize = 1 << 23;

#[derive(Debug, Clone, Serialize)]
pub struct UniformityRow {
    pub model: String,
    pub n: usize,
    pub strategy: Strategy,
    pub cells: usize,
    pub draws: usize,
    /// Draws that matched no enumerated tree (always 0 for a correct sampler).
    pub unmatched: usize,
    pub chi2: f64,
    pub p_value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyRow {
    pub model: String,
    pub n: usize,
    pub chi2: f64,
    pub p_value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformityReport {
    pub rows: Vec<UniformityRow>,
    pub consistency: Vec<ConsistencyRow>,
    pub passed: bool,
}

/// Counts of each enumerated labelled tree among `draws` samples, plus the
/// number of samples that matched none.
pub fn uniformity_check(
    params: &ModelParams,
    n: usize,
    draws: usize,
    strategy: Strategy,
    seed: u64,
    model_index: usize,
) -> Result<(Vec<u64>, usize), ExperimentError> {
    let all = exact_small_sampler(params, n)?;
    let index: HashMap<String, usize> = all.iter().enumerate().map(|(i, t)| (t.labelled_key(), i)).collect();
    let sampler = ConditionedSampler::new(params, n, RootMode::Free)?;
    let offset = if strategy == Strategy::Rejection {
        REJECTION_STREAM
    } else {
        0
    };
    let hits: Vec<Option<usize>> = (0..draws)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replicate_rng(seed, model_index, n, rep + offset);
            let t = sampler.sample(&mut rng, strategy)?;
            Ok(index.get(&t.normalized().labelled_key()).copied())
        })
        .collect::<Result<_, ExperimentError>>()?;
    let mut counts = vec![0u64; all.len()];
    let mut unmatched = 0;
    for h in hits {
        match h {
            Some(i) => counts[i] += 1,
            None => unmatched += 1,
        }
    }
    Ok((counts, unmatched))
}

/// Chi-square of both strategies against the uniform law on the enumerated
/// trees, and of the two strategies against each other.
pub fn run_uniformity_suite(cfg: &ExperimentConfig) -> Result<UniformityReport, ExperimentError> {
    let models = cfg.validate()?;
    let mut report = UniformityReport {
        rows: Vec::new(),
        consistency: Vec::new(),
        passed: true,
    };
    for (mi, params) in models.iter().enumerate() {
        let name = cfg.models[mi].to_string();
        for &n in &cfg.ns {
            let mut per_strategy = Vec::new();
            for strategy in [Strategy::Exact, Strategy::Rejection] {
                let (counts, unmatched) = uniformity_check(params, n, cfg.replicates, strategy, cfg.seed, mi)?;
                let uniform = vec![1.0 / counts.len() as f64; counts.len()];
                let r = chi_square_gof(&counts, &uniform);
                let pass = unmatched == 0 && r.p_value > cfg.alpha;
                report.passed &= pass;
                report.rows.push(UniformityRow {
                    model: name.clone(),
                    n,
                    strategy,
                    cells: counts.len(),
                    draws: cfg.replicates,
                    unmatched,
                    chi2: r.statistic,
                    p_value: r.p_value,
                    pass,
                });
                per_strategy.push(counts);
            }
            let r = chi_square_two_sample(&per_strategy[0], &per_strategy[1]);
            let pass = r.p_value > cfg.alpha;
            report.passed &= pass;
            report.consistency.push(ConsistencyRow {
                model: name.clone(),
                n,
                chi2: r.statistic,
                p_value: r.p_value,
                pass,
            });
        }
    }
    Ok(report)
}

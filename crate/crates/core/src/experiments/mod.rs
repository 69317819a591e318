//! Experiment runners behind the command line: scaling statistics, local
//! limits, uniformity checks and largest-component deficits.
//!
//! Replicate `r` of model `m` at size `n` draws from its own stream derived
//! from the master seed, so output does not depend on thread scheduling.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::model::ModelError;
use crate::samplers::{RngHandle, SamplerError};

mod config;
mod deficit;
mod local;
mod scaling;
mod uniformity;

pub use config::{ExperimentConfig, ModelSpec};
pub use deficit::{deficit_threshold, run_deficit_experiment, DeficitOutput, DeficitSummaryRow};
pub use local::{
    exact_root_degree_tv, exact_truncated2_tv, finite_class_law, kesten_class_law, root_degree_class,
    run_local_experiment, truncated2_class, ClassLaw, LocalOutput, LocalSummaryRow,
};
pub use scaling::{run_scaling_experiment, scaling_sample, KsRow, ScalingOutput, ScalingSample, ScalingSummaryRow};
pub use uniformity::{run_uniformity_suite, uniformity_check, ConsistencyRow, UniformityReport, UniformityRow};

/// Version of the summary JSON layout.
pub const SUMMARY_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One CSV record. `rescaled` is only set for graph distances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatRow {
    pub experiment: String,
    pub k: usize,
    pub omega: String,
    pub n: usize,
    pub seed: u64,
    pub replicate: u64,
    pub stat: String,
    pub value: f64,
    pub rescaled: Option<f64>,
}

pub fn write_csv<W: Write>(rows: &[StatRow], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary<T: Serialize> {
    pub schema: &'static str,
    pub version: u32,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub results: T,
}

impl<T: Serialize> Summary<T> {
    pub fn new(experiment: &str, config: &ExperimentConfig, results: T) -> Self {
        Summary {
            schema: "omega-ktree-summary",
            version: SUMMARY_VERSION,
            experiment: experiment.to_string(),
            config: config.clone(),
            results,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summaries serialize")
    }
}

/// Generator of replicate `rep` for model index `model` at size `n`.
pub fn replicate_rng(seed: u64, model: usize, n: usize, rep: usize) -> crate::samplers::SamplerRng {
    let stream = ((model as u64) << 52) ^ ((n as u64) << 24) ^ rep as u64;
    RngHandle::new(seed, stream).rng()
}

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::model::{ModelParams, OmegaSet};
use crate::samplers::Strategy;

/// A `(k, Ω)` pair, written `k:Ω` as in `2:N0` or `2:{0,1,2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub k: usize,
    pub omega: OmegaSet,
}

impl ModelSpec {
    pub fn new(k: usize, omega: OmegaSet) -> Self {
        ModelSpec { k, omega }
    }

    pub fn params(&self) -> Result<ModelParams, ExperimentError> {
        Ok(ModelParams::new(self.k, self.omega.clone())?)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.k, self.omega)
    }
}

impl FromStr for ModelSpec {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (k, omega) = s
            .split_once(':')
            .ok_or_else(|| ExperimentError::Config(format!("model '{s}' is not of the form k:omega")))?;
        let k = k
            .trim()
            .parse()
            .map_err(|_| ExperimentError::Config(format!("bad k in model '{s}'")))?;
        Ok(ModelSpec {
            k,
            omega: omega.trim().parse()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub models: Vec<ModelSpec>,
    pub ns: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub strategy: Strategy,
    /// Statistics to emit; empty means all.
    pub stats: Vec<String>,
    /// Significance level of KS and chi-square checks.
    pub alpha: f64,
    /// Total variation threshold of local checks.
    pub tv_max: f64,
    pub heights: Vec<usize>,
    pub radii: Vec<usize>,
    /// Exponent of the deficit threshold `n^ε`.
    pub epsilon: f64,
    /// BFS sources used to estimate diameters of large graphs.
    pub diameter_sources: usize,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            models: vec![ModelSpec::new(2, OmegaSet::full())],
            ns: vec![1000],
            replicates: 100,
            seed: 1,
            strategy: Strategy::Exact,
            stats: Vec::new(),
            alpha: 1e-3,
            tv_max: 0.05,
            heights: vec![1, 2],
            radii: vec![1, 2],
            epsilon: 0.25,
            diameter_sources: 8,
            out: None,
        }
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ExperimentError> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| ExperimentError::Config(format!("bad entry '{s}' for {key}")))
        })
        .collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T, ExperimentError> {
    value
        .trim()
        .parse()
        .map_err(|_| ExperimentError::Config(format!("bad value '{value}' for {key}")))
}

impl ExperimentConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        match key {
            "models" | "model" => {
                self.models = value
                    .split(|c: char| c == ';' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_, _>>()?;
            }
            "n" | "ns" => self.ns = parse_list(key, value)?,
            "replicates" => self.replicates = parse_one(key, value)?,
            "seed" => self.seed = parse_one(key, value)?,
            "strategy" => self.strategy = parse_one(key, value)?,
            "stats" => self.stats = parse_list(key, value)?,
            "alpha" => self.alpha = parse_one(key, value)?,
            "tv_max" => self.tv_max = parse_one(key, value)?,
            "heights" => self.heights = parse_list(key, value)?,
            "radii" => self.radii = parse_list(key, value)?,
            "epsilon" => self.epsilon = parse_one(key, value)?,
            "diameter_sources" => self.diameter_sources = parse_one(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            _ => return Err(ExperimentError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Flat `key = value` text; `#` starts a comment.
    pub fn from_kv_text(text: &str) -> Result<Self, ExperimentError> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_kv_text(text)?;
        Ok(cfg)
    }

    pub fn apply_kv_text(&mut self, text: &str) -> Result<(), ExperimentError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ExperimentError::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn wants(&self, stat: &str) -> bool {
        self.stats.is_empty() || self.stats.iter().any(|s| s == stat)
    }

    /// Checks the config and resolves every model.
    pub fn validate(&self) -> Result<Vec<ModelParams>, ExperimentError> {
        if self.replicates == 0 {
            return Err(ExperimentError::Config("replicates must be at least 1".into()));
        }
        if self.models.is_empty() {
            return Err(ExperimentError::Config("no models given".into()));
        }
        if self.ns.contains(&0) {
            return Err(ExperimentError::Config("sizes must be positive".into()));
        }
        self.models.iter().map(ModelSpec::params).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_text_overrides_defaults() {
        let cfg = ExperimentConfig::from_kv_text(
            "# scaling run\nmodels = 1:N0; 2:{0,1,2}\nn = 100, 200\nreplicates = 7\nstrategy = rejection\n",
        )
        .unwrap();
        assert_eq!(cfg.models.len(), 2);
        assert_eq!(cfg.models[1].to_string(), "2:{0,1,2}");
        assert_eq!(cfg.ns, vec![100, 200]);
        assert_eq!(cfg.replicates, 7);
        assert_eq!(cfg.strategy, Strategy::Rejection);
        assert!(ExperimentConfig::from_kv_text("bogus = 1").is_err());
        assert!(ExperimentConfig::from_kv_text("replicates = 0")
            .unwrap()
            .validate()
            .is_err());
    }
}

//! Finite discrete probability mass functions on the non-negative integers.

use rand::Rng;
use rand_distr::{Distribution, WeightedAliasIndex};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PmfError {
    #[error("distribution has zero mean; size-biasing is undefined")]
    ZeroMean,
    #[error("distribution has no positive mass")]
    Empty,
}

/// Probability mass function stored densely: `probs[i] = P[X = i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePmf {
    probs: Vec<f64>,
}

impl DiscretePmf {
    /// Builds a pmf from non-negative weights, normalizing them to sum to one.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self, PmfError> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(PmfError::Empty);
        }
        for w in &mut weights {
            *w /= total;
        }
        trim_trailing_zeros(&mut weights);
        Ok(Self { probs: weights })
    }

    /// Builds a pmf from probabilities that are already normalized.
    pub fn from_probs(mut probs: Vec<f64>) -> Self {
        trim_trailing_zeros(&mut probs);
        Self { probs }
    }

    pub fn point_mass(value: usize) -> Self {
        let mut probs = vec![0.0; value + 1];
        probs[value] = 1.0;
        Self { probs }
    }

    pub fn prob(&self, value: usize) -> f64 {
        self.probs.get(value).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// One past the largest value with positive stored mass.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(i, _)| i)
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(i, p)| i as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d = i as f64 - mean;
                d * d * p
            })
            .sum()
    }

    /// Law of `X_1 + X_2` for independent copies with laws `self` and `other`.
    pub fn convolve(&self, other: &DiscretePmf) -> DiscretePmf {
        if self.is_empty() || other.is_empty() {
            return DiscretePmf { probs: Vec::new() };
        }
        let mut out = vec![0.0; self.len() + other.len() - 1];
        for (i, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (j, &q) in other.probs.iter().enumerate() {
                out[i + j] += p * q;
            }
        }
        Self::from_probs(out)
    }

    /// Law of the sum of `times` independent copies.
    pub fn convolution_power(&self, times: usize) -> DiscretePmf {
        let mut acc = DiscretePmf::point_mass(0);
        for _ in 0..times {
            acc = acc.convolve(self);
        }
        acc
    }

    /// Law of `factor * X`.
    pub fn scale(&self, factor: usize) -> DiscretePmf {
        assert!(factor >= 1, "scale factor must be positive");
        let mut out = vec![0.0; (self.len().max(1) - 1) * factor + 1];
        for (i, &p) in self.probs.iter().enumerate() {
            out[i * factor] = p;
        }
        Self::from_probs(out)
    }

    /// Size-biased law `P'[i] = i P[i] / E[X]`.
    pub fn size_bias(&self) -> Result<DiscretePmf, PmfError> {
        let mean = self.mean();
        if mean.is_nan() || mean <= 0.0 {
            return Err(PmfError::ZeroMean);
        }
        let out = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, p)| i as f64 * p / mean)
            .collect();
        Ok(Self::from_probs(out))
    }

    /// Law conditioned on `X >= 1`.
    pub fn condition_positive(&self) -> Result<DiscretePmf, PmfError> {
        let mut w = self.probs.clone();
        if let Some(first) = w.first_mut() {
            *first = 0.0;
        }
        Self::from_weights(w)
    }

    /// Total-variation distance `1/2 sum |p_i - q_i|`.
    pub fn total_variation(&self, other: &DiscretePmf) -> f64 {
        let n = self.len().max(other.len());
        0.5 * (0..n).map(|i| (self.prob(i) - other.prob(i)).abs()).sum::<f64>()
    }

    pub fn sampler(&self) -> PmfSampler {
        PmfSampler::new(self)
    }
}

/// `ln P(S_m = s)` for `s = 0..=smax`, where `S_m` is a sum of `m` independent
/// copies of `probs` (`probs[0] > 0` required).
///
/// For `smax <= m` this uses the power recurrence
/// `s p_0 g_s = Σ_{j=1}^{s} ((m+1) j − s) p_j g_{s−j}`,
/// whose terms are all non-negative for `s <= m`. Values are carried relative
/// to a running scale so that neither `p_0^m` nor large ratios leave range.
pub fn log_power_probs(probs: &[f64], m: usize, smax: usize) -> Vec<f64> {
    assert!(!probs.is_empty() && probs[0] > 0.0, "need positive mass at 0");
    if smax > m {
        return log_power_direct(probs, m, smax);
    }
    if m == 0 {
        return (0..=smax)
            .map(|s| if s == 0 { 0.0 } else { f64::NEG_INFINITY })
            .collect();
    }
    let p0 = probs[0];
    let mut g = vec![0.0f64; smax + 1];
    g[0] = 1.0;
    // g[s] * exp(log_scale) = P(S_m = s) / p0^m
    let mut log_scale = 0.0f64;
    let mf = (m + 1) as f64;
    for s in 1..=smax {
        let top = s.min(probs.len() - 1);
        let mut acc = 0.0;
        for j in 1..=top {
            let pj = probs[j];
            if pj > 0.0 {
                acc += (mf * j as f64 - s as f64) * pj * g[s - j];
            }
        }
        g[s] = acc / (s as f64 * p0);
        if g[s] > 1e250 {
            for x in g[..=s].iter_mut() {
                *x *= 1e-250;
            }
            log_scale += 250.0 * std::f64::consts::LN_10;
        }
    }
    let base = m as f64 * p0.ln() + log_scale;
    g.into_iter()
        .map(|x| if x > 0.0 { x.ln() + base } else { f64::NEG_INFINITY })
        .collect()
}

/// Repeated convolution, truncated at `smax`; for few summands.
fn log_power_direct(probs: &[f64], m: usize, smax: usize) -> Vec<f64> {
    let mut acc = vec![0.0f64; smax + 1];
    acc[0] = 1.0;
    for _ in 0..m {
        let mut next = vec![0.0f64; smax + 1];
        for (s, &a) in acc.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &p) in probs.iter().enumerate().take(smax + 1 - s) {
                next[s + j] += a * p;
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|x| if x > 0.0 { x.ln() } else { f64::NEG_INFINITY })
        .collect()
}

fn trim_trailing_zeros(v: &mut Vec<f64>) {
    while matches!(v.last(), Some(&p) if p == 0.0) {
        v.pop();
    }
}

/// Alias-method sampler over the values of a [`DiscretePmf`].
#[derive(Debug, Clone)]
pub struct PmfSampler {
    alias: WeightedAliasIndex<f64>,
}

impl PmfSampler {
    pub fn new(pmf: &DiscretePmf) -> Self {
        let alias =
            WeightedAliasIndex::new(pmf.probs.clone()).expect("pmf must have positive total mass and finite entries");
        Self { alias }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.alias.sample(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_bias_of_point_mass_is_fixed_point() {
        let p = DiscretePmf::point_mass(3);
        let once = p.size_bias().unwrap();
        let twice = once.size_bias().unwrap();
        assert_eq!(once, p);
        assert_eq!(twice, p);
    }

    #[test]
    fn size_bias_rejects_zero_mean() {
        assert_eq!(DiscretePmf::point_mass(0).size_bias(), Err(PmfError::ZeroMean));
    }

    #[test]
    fn convolution_of_bernoullis() {
        let b = DiscretePmf::from_probs(vec![0.5, 0.5]);
        let c = b.convolve(&b);
        assert_eq!(c.probs(), &[0.25, 0.5, 0.25]);
        assert_eq!(b.convolution_power(2), c);
    }

    #[test]
    fn scale_moves_mass() {
        let b = DiscretePmf::from_probs(vec![0.5, 0.25, 0.25]).scale(3);
        assert_eq!(b.prob(0), 0.5);
        assert_eq!(b.prob(3), 0.25);
        assert_eq!(b.prob(6), 0.25);
        assert_eq!(b.prob(1), 0.0);
        assert!((b.mean() - 2.25).abs() < 1e-15);
    }

    #[test]
    fn power_probs_match_convolution() {
        let p = DiscretePmf::from_probs(vec![0.5, 0.3, 0.0, 0.2]);
        let direct = p.convolution_power(7);
        let logs = log_power_probs(p.probs(), 7, 7);
        for (s, lp) in logs.iter().enumerate() {
            assert!((lp.exp() - direct.prob(s)).abs() < 1e-14, "s={s}");
        }
    }

    #[test]
    fn power_probs_survive_underflow() {
        // Sum of 20000 Poisson(1/2) is Poisson(10000).
        let mut probs = vec![(-0.5f64).exp()];
        for i in 1..30 {
            let prev = probs[i - 1];
            probs.push(prev * 0.5 / i as f64);
        }
        let logs = log_power_probs(&probs, 20_000, 10_000);
        let lambda = 10_000f64;
        let want = -lambda + lambda * lambda.ln() - statrs::function::gamma::ln_gamma(lambda + 1.0);
        assert!((logs[10_000] - want).abs() < 1e-6);
    }

    #[test]
    fn total_variation_is_symmetric() {
        let a = DiscretePmf::from_probs(vec![0.2, 0.8]);
        let b = DiscretePmf::from_probs(vec![0.5, 0.25, 0.25]);
        assert!((a.total_variation(&b) - b.total_variation(&a)).abs() < 1e-15);
        assert!((a.total_variation(&b) - 0.55).abs() < 1e-12);
    }
}

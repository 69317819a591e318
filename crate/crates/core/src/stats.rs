//! Goodness-of-fit helpers: two-sample Kolmogorov-Smirnov, chi-square and
//! total variation between frequency tables.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (including the usual small-sample correction of the argument).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> TestResult {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs two nonempty samples");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let en = (na * nb / (na + nb)).sqrt();
    TestResult {
        statistic: d,
        p_value: kolmogorov_q((en + 0.12 + 0.11 / en) * d),
    }
}

/// Tail of the Kolmogorov distribution, `2 Σ (−1)^{j−1} exp(−2 j² λ²)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Pearson goodness of fit of `observed` counts against `expected` probabilities.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> TestResult {
    assert_eq!(observed.len(), expected.len());
    let total: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let cells = expected.iter().filter(|&&p| p > 0.0).count();
    TestResult {
        statistic: stat,
        p_value: chi_square_tail(stat, cells.saturating_sub(1)),
    }
}

/// Pearson homogeneity test for two count vectors over the same cells.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> TestResult {
    assert_eq!(a.len(), b.len());
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        cells += 1;
        let ea = col * na / (na + nb);
        let eb = col * nb / (na + nb);
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    TestResult {
        statistic: stat,
        p_value: chi_square_tail(stat, cells.saturating_sub(1)),
    }
}

fn chi_square_tail(stat: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    (1.0 - dist.cdf(stat)).clamp(0.0, 1.0)
}

/// Counts of hashable outcomes.
pub fn frequencies<T: Hash + Eq + Clone, I: IntoIterator<Item = T>>(items: I) -> HashMap<T, u64> {
    let mut map = HashMap::new();
    for item in items {
        *map.entry(item).or_insert(0) += 1;
    }
    map
}

/// Total variation between two empirical tables.
pub fn tv_tables<T: Hash + Eq>(a: &HashMap<T, u64>, b: &HashMap<T, u64>) -> f64 {
    let (na, nb) = (a.values().sum::<u64>() as f64, b.values().sum::<u64>() as f64);
    let mut sum = 0.0;
    for (key, &x) in a {
        let y = b.get(key).copied().unwrap_or(0);
        sum += (x as f64 / na - y as f64 / nb).abs();
    }
    for (key, &y) in b {
        if !a.contains_key(key) {
            sum += y as f64 / nb;
        }
    }
    sum / 2.0
}

/// Total variation between an empirical table and a law given as
/// probabilities; mass of the law outside the table counts fully.
pub fn tv_to_law<T: Hash + Eq + Ord>(counts: &HashMap<T, u64>, law: &BTreeMap<T, f64>) -> f64 {
    let n = counts.values().sum::<u64>() as f64;
    let mut sum = 0.0;
    for (key, &p) in law {
        let q = counts.get(key).copied().unwrap_or(0) as f64 / n;
        sum += (p - q).abs();
    }
    for (key, &c) in counts {
        if !law.contains_key(key) {
            sum += c as f64 / n;
        }
    }
    sum / 2.0
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len().max(1) as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

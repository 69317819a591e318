//! Degree sets and the analytic constants of the critical Boltzmann model.
//!
//! A model is a pair `(k, Ω)`. Every front of an Ω-k-tree lies in a number of
//! hedra taken from Ω; in the coding tree that means the root white node has
//! an outdegree in Ω and every other white node has an outdegree in
//! `Ω_out = {i : i + 1 ∈ Ω}`. The generating function `B(x)` of reduced coding
//! trees satisfies `B = x · φ(B)^k` with `φ(y) = Σ_{i ∈ Ω_out} y^i / i!`, and its
//! dominant singularity is where `Σ_{i ∈ Ω_out, i ≥ 1} (k i − 1) B^i / i! = 1`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pmf::DiscretePmf;

pub const DEFAULT_TOL: f64 = 1e-12;

/// Mass below which a pmf tail is cut off.
const TAIL_CUTOFF: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("degree set must contain 0 and 1 and some integer >= 2, got {0}")]
    InvalidOmega(String),
    #[error("clique parameter k must be positive")]
    InvalidK,
    #[error("tolerance must be positive and finite")]
    InvalidTol,
    #[error("singularity equation has no positive root for k={k}, omega={omega}")]
    DegenerateModel { k: usize, omega: String },
    #[error("cannot parse degree set {0:?}")]
    Parse(String),
    #[error("stored parameters disagree with recomputed ones: {0}")]
    Mismatch(String),
}

/// A set of non-negative integers, either finite or all of ℕ₀.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DegreeSet {
    /// Sorted, duplicate-free members.
    Finite(Vec<usize>),
    Full,
}

impl DegreeSet {
    pub fn contains(&self, i: usize) -> bool {
        match self {
            DegreeSet::Finite(v) => v.binary_search(&i).is_ok(),
            DegreeSet::Full => true,
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self, DegreeSet::Full)
    }

    /// Largest member, `None` for ℕ₀.
    pub fn max(&self) -> Option<usize> {
        match self {
            DegreeSet::Finite(v) => v.last().copied(),
            DegreeSet::Full => None,
        }
    }

    /// Members not exceeding `bound`, in increasing order.
    pub fn members_upto(&self, bound: usize) -> Vec<usize> {
        match self {
            DegreeSet::Finite(v) => v.iter().copied().filter(|&i| i <= bound).collect(),
            DegreeSet::Full => (0..=bound).collect(),
        }
    }

    /// Greatest common divisor of the members (0 is neutral).
    pub fn gcd(&self) -> usize {
        match self {
            DegreeSet::Finite(v) => v.iter().fold(0usize, |g, &i| g.gcd(&i)),
            DegreeSet::Full => 1,
        }
    }
}

impl fmt::Display for DegreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeSet::Full => write!(f, "N0"),
            DegreeSet::Finite(v) => {
                write!(f, "{{")?;
                for (i, m) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// The admissible degree set Ω: contains 0 and 1 and some integer `>= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OmegaSet(DegreeSet);

impl OmegaSet {
    pub fn full() -> Self {
        OmegaSet(DegreeSet::Full)
    }

    pub fn finite(members: impl IntoIterator<Item = usize>) -> Result<Self, ModelError> {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        let set = DegreeSet::Finite(v);
        let ok = set.contains(0) && set.contains(1) && set.max().is_some_and(|m| m >= 2);
        if !ok {
            return Err(ModelError::InvalidOmega(set.to_string()));
        }
        Ok(OmegaSet(set))
    }

    pub fn as_set(&self) -> &DegreeSet {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn is_full(&self) -> bool {
        self.0.is_full()
    }

    /// `Ω_out = {i : i + 1 ∈ Ω}`, the outdegree set of non-root white nodes.
    pub fn out(&self) -> DegreeSet {
        match &self.0 {
            DegreeSet::Full => DegreeSet::Full,
            DegreeSet::Finite(v) => DegreeSet::Finite(v.iter().filter(|&&i| i >= 1).map(|&i| i - 1).collect()),
        }
    }

    /// Members as JSON-friendly integers, `None` for ℕ₀.
    pub fn members(&self) -> Option<&[usize]> {
        match &self.0 {
            DegreeSet::Finite(v) => Some(v),
            DegreeSet::Full => None,
        }
    }
}

impl fmt::Display for OmegaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for OmegaSet {
    type Err = ModelError;

    /// Accepts `N0`, `ℕ₀`, `full`, or a comma-separated list such as `{0,1,2}`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if matches!(t, "N0" | "n0" | "ℕ₀" | "ℕ0" | "full" | "all") {
            return Ok(OmegaSet::full());
        }
        let inner = t.trim_start_matches('{').trim_end_matches('}');
        let members = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<usize>().map_err(|_| ModelError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        OmegaSet::finite(members)
    }
}

impl Serialize for OmegaSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        OmegaRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OmegaSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match OmegaRepr::deserialize(deserializer)? {
            OmegaRepr::Members(v) => OmegaSet::finite(v).map_err(serde::de::Error::custom),
            OmegaRepr::Named(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum OmegaRepr {
    Members(Vec<usize>),
    Named(String),
}

impl From<&OmegaSet> for OmegaRepr {
    fn from(o: &OmegaSet) -> Self {
        match o.members() {
            Some(v) => OmegaRepr::Members(v.to_vec()),
            None => OmegaRepr::Named("N0".to_string()),
        }
    }
}

/// Sum of `y^i / i!` over the members of `set`; infinite sets are truncated
/// once a term drops below `tol` times the partial sum.
pub(crate) fn exp_partial_sum(set: &DegreeSet, y: f64, tol: f64) -> f64 {
    match set {
        DegreeSet::Finite(v) => v.iter().map(|&i| power_over_factorial(y, i)).sum(),
        DegreeSet::Full => {
            let mut sum = 0.0;
            let mut term = 1.0;
            let mut i = 0usize;
            loop {
                sum += term;
                i += 1;
                term *= y / i as f64;
                if (i as f64) > y && term < tol * sum {
                    sum += term;
                    break sum;
                }
            }
        }
    }
}

fn power_over_factorial(y: f64, i: usize) -> f64 {
    (1..=i).fold(1.0, |acc, j| acc * y / j as f64)
}

/// Left side of the singularity equation, `Σ_{i ∈ Ω_out, i ≥ 1} (k i − 1) y^i / i!`.
fn criticality_lhs(k: usize, out: &DegreeSet, y: f64, tol: f64) -> f64 {
    match out {
        DegreeSet::Finite(v) => v
            .iter()
            .filter(|&&i| i >= 1)
            .map(|&i| (k * i - 1) as f64 * power_over_factorial(y, i))
            .sum(),
        DegreeSet::Full => {
            let mut sum = 0.0;
            let mut term = 1.0;
            let mut i = 0usize;
            loop {
                i += 1;
                term *= y / i as f64;
                let contribution = (k * i - 1) as f64 * term;
                sum += contribution;
                if (i as f64) > 2.0 * y && contribution < tol * sum.max(1e-300) {
                    break sum;
                }
            }
        }
    }
}

/// Solves for `(ρ, B(ρ))`: `B` by bisection on the increasing left side of
/// the singularity equation, then `ρ = B / φ(B)^k`.
pub fn solve_singularity(k: usize, omega: &OmegaSet, tol: f64) -> Result<(f64, f64), ModelError> {
    if k == 0 {
        return Err(ModelError::InvalidK);
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(ModelError::InvalidTol);
    }
    let out = omega.out();
    let degenerate = || ModelError::DegenerateModel {
        k,
        omega: omega.to_string(),
    };
    // All coefficients (k i - 1) vanish exactly when k = 1 and Ω_out ⊆ {0, 1}.
    let has_positive_coefficient = match &out {
        DegreeSet::Full => true,
        DegreeSet::Finite(v) => v.iter().any(|&i| i >= 1 && k * i > 1),
    };
    if !has_positive_coefficient {
        return Err(degenerate());
    }

    let mut hi = 1.0f64;
    let mut doublings = 0;
    while criticality_lhs(k, &out, hi, tol) < 1.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(degenerate());
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if criticality_lhs(k, &out, mid, tol) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b = 0.5 * (lo + hi);
    let phi = exp_partial_sum(&out, b, tol);
    let rho = b / phi.powi(k as i32);
    Ok((rho, b))
}

/// Exact harmonic number `H_k` as a rational.
pub fn harmonic(k: usize) -> BigRational {
    (1..=k).fold(BigRational::zero(), |acc, j| {
        acc + BigRational::new(BigInt::one(), BigInt::from(j))
    })
}

/// Expected spine step `𝔪_k = k H_k`, exactly.
pub fn spine_step_mean(k: usize) -> BigRational {
    harmonic(k) * BigRational::from_integer(BigInt::from(k))
}

/// All derived constants of a non-degenerate model `(k, Ω)`.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub k: usize,
    pub omega: OmegaSet,
    /// Dominant singularity ρ.
    pub rho: f64,
    /// `B(ρ)`.
    pub b_rho: f64,
    /// `C(ρ) = Σ_{i∈Ω} B(ρ)^i / i!`.
    pub c_rho: f64,
    /// `C°(ρ) = Σ_{i∈Ω_out} B(ρ)^i / i!`.
    pub c_circ_rho: f64,
    /// `σ_Ω = sqrt(k Var ξ°)`.
    pub sigma: f64,
    /// `𝔪_k = k H_k`, exact.
    pub m_k: BigRational,
    /// `gcd(Ω_out)`.
    pub span: usize,
    pub tol: f64,
}

impl ModelParams {
    pub fn new(k: usize, omega: OmegaSet) -> Result<Self, ModelError> {
        Self::with_tol(k, omega, DEFAULT_TOL)
    }

    pub fn with_tol(k: usize, omega: OmegaSet, tol: f64) -> Result<Self, ModelError> {
        let (rho, b_rho) = solve_singularity(k, &omega, tol)?;
        let out = omega.out();
        let c_circ_rho = exp_partial_sum(&out, b_rho, tol);
        let c_rho = exp_partial_sum(omega.as_set(), b_rho, tol);
        let span = out.gcd();
        let mut params = ModelParams {
            k,
            omega,
            rho,
            b_rho,
            c_rho,
            c_circ_rho,
            sigma: 0.0,
            m_k: spine_step_mean(k),
            span,
            tol,
        };
        params.sigma = (k as f64 * params.offspring_white().variance()).sqrt();
        Ok(params)
    }

    /// `Ω_out`.
    pub fn omega_out(&self) -> DegreeSet {
        self.omega.out()
    }

    pub fn m_k_f64(&self) -> f64 {
        self.m_k.to_f64().expect("k H_k is a small rational")
    }

    /// Distance rescaling `k H_k σ_Ω / (2 √n)`.
    pub fn scale(&self, n: usize) -> f64 {
        self.m_k_f64() * self.sigma / (2.0 * (n as f64).sqrt())
    }

    /// Residual of `B = ρ φ(B)^k` at the computed singularity.
    pub fn fixed_point_residual(&self) -> f64 {
        let phi = exp_partial_sum(&self.omega_out(), self.b_rho, self.tol);
        (self.b_rho - self.rho * phi.powi(self.k as i32)).abs()
    }

    /// Law of ξ°, the number of black children of a non-root white node.
    pub fn offspring_white(&self) -> DiscretePmf {
        weights_over(&self.omega_out(), self.b_rho, self.tol)
    }

    /// Law of ξ• (black grandchildren, k-fold convolution of ξ°) and of the
    /// plane-tree offspring ξ = k ξ°.
    pub fn offspring_black(&self) -> BlackOffspring {
        let white = self.offspring_white();
        BlackOffspring {
            grandchildren: white.convolution_power(self.k),
            plane: white.scale(self.k),
        }
    }

    /// Law of η°, the root outdegree of an unreduced coding tree.
    pub fn root_law(&self) -> DiscretePmf {
        weights_over(self.omega.as_set(), self.b_rho, self.tol)
    }

    /// Plane-tree root law η = k η°.
    pub fn plane_root_law(&self) -> DiscretePmf {
        self.root_law().scale(self.k)
    }

    pub fn constants(&self) -> Constants {
        Constants {
            sigma: self.sigma,
            m_k: self.m_k.clone(),
        }
    }

    pub fn report(&self) -> ParamsReport {
        ParamsReport {
            k: self.k,
            omega: self.omega.clone(),
            rho: self.rho,
            b_rho: self.b_rho,
            sigma: self.sigma,
            m_k: self.m_k_f64(),
            span: self.span,
        }
    }

    /// Rebuilds parameters from a report, checking the stored constants.
    pub fn from_report(report: &ParamsReport) -> Result<Self, ModelError> {
        let params = ModelParams::new(report.k, report.omega.clone())?;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
        if !close(params.rho, report.rho) {
            return Err(ModelError::Mismatch(format!("rho {} vs {}", params.rho, report.rho)));
        }
        if !close(params.b_rho, report.b_rho) {
            return Err(ModelError::Mismatch(format!(
                "b_rho {} vs {}",
                params.b_rho, report.b_rho
            )));
        }
        if params.span != report.span {
            return Err(ModelError::Mismatch(format!("span {} vs {}", params.span, report.span)));
        }
        Ok(params)
    }
}

/// `P[i] ∝ y^i / i!` over `set`, cut where the tail falls below the cutoff.
fn weights_over(set: &DegreeSet, y: f64, tol: f64) -> DiscretePmf {
    let weights: Vec<f64> = match set {
        DegreeSet::Finite(v) => {
            let mut w = vec![0.0; v.last().map_or(1, |m| m + 1)];
            for &i in v {
                w[i] = power_over_factorial(y, i);
            }
            w
        }
        DegreeSet::Full => {
            let total = exp_partial_sum(set, y, tol);
            let mut w = Vec::new();
            let mut term = 1.0;
            let mut i = 0usize;
            loop {
                w.push(term);
                i += 1;
                term *= y / i as f64;
                // Once terms decay by at least half per step the tail is < 2 term.
                if (i as f64) > 2.0 * y && 2.0 * term < TAIL_CUTOFF * 1e-4 * total {
                    break;
                }
            }
            w
        }
    };
    DiscretePmf::from_weights(weights).expect("weights contain the term for 0")
}

#[derive(Debug, Clone)]
pub struct BlackOffspring {
    /// ξ•: black grandchildren of a black node.
    pub grandchildren: DiscretePmf,
    /// ξ = k ξ°: offspring in the white plane tree.
    pub plane: DiscretePmf,
}

#[derive(Debug, Clone)]
pub struct Constants {
    pub sigma: f64,
    pub m_k: BigRational,
}

impl Constants {
    pub fn scale(&self, n: usize) -> f64 {
        self.m_k.to_f64().unwrap_or(f64::NAN) * self.sigma / (2.0 * (n as f64).sqrt())
    }
}

/// JSON document `{k, omega, rho, b_rho, sigma, m_k, span}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ParamsReport {
    pub k: usize,
    pub omega: OmegaSet,
    pub rho: f64,
    pub b_rho: f64,
    pub sigma: f64,
    pub m_k: f64,
    pub span: usize,
}

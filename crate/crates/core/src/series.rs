//! Exact enumeration of coding trees and front-rooted Ω-k-trees.
//!
//! Labelled series are held as integer count sequences `a(n) = n! [xⁿ] A(x)`,
//! so an EGF product becomes a binomial convolution and no rational arithmetic
//! is needed in the hot loops.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::model::{DegreeSet, ModelError, ModelParams, OmegaSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("binom(n+k,k) c(n) is not divisible by kn+1 at n={n}")]
    DivisibilityViolation { n: usize },
    #[error("unlabeled enumeration is only implemented for omega = N0")]
    UnsupportedOmega,
    #[error("n must be at least 1")]
    ZeroSize,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Exponential generating function with exact rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct EgfSeries {
    pub coeffs: Vec<BigRational>,
}

impl EgfSeries {
    /// Builds `Σ a(n) xⁿ / n!` from labelled counts.
    pub fn from_counts(counts: &[BigInt]) -> Self {
        let mut fact = BigInt::one();
        let coeffs = counts
            .iter()
            .enumerate()
            .map(|(n, a)| {
                if n > 0 {
                    fact *= n;
                }
                BigRational::new(a.clone(), fact.clone())
            })
            .collect();
        EgfSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `n! [xⁿ]`, or `None` if some coefficient is not a counting number.
    pub fn counts(&self) -> Option<Vec<BigInt>> {
        let mut fact = BigInt::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (n, c) in self.coeffs.iter().enumerate() {
            if n > 0 {
                fact *= n;
            }
            let v = c * BigRational::from_integer(fact.clone());
            if !v.is_integer() || v < BigRational::zero() {
                return None;
            }
            out.push(v.to_integer());
        }
        Some(out)
    }
}

/// Ordinary generating function with big-integer coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OgfSeries {
    pub coeffs: Vec<BigInt>,
}

impl OgfSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Ratio estimate `a(n−1)/a(n)` of the radius of convergence at the top order.
    pub fn radius_estimate(&self) -> Option<f64> {
        let n = self.order();
        if n < 2 {
            return None;
        }
        let hi = ln_big(&self.coeffs[n])?;
        let lo = ln_big(&self.coeffs[n - 1])?;
        Some((lo - hi).exp())
    }
}

/// Labelled counts with root front fixed: reduced trees `b`, the white
/// subtree `c°` hanging below a non-root white node, and unreduced trees `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelledCounts {
    #[serde(serialize_with = "ser_bigints")]
    pub b: Vec<BigInt>,
    #[serde(serialize_with = "ser_bigints")]
    pub c_circ: Vec<BigInt>,
    #[serde(serialize_with = "ser_bigints")]
    pub c: Vec<BigInt>,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl LabelledCounts {
    pub fn max_n(&self) -> usize {
        self.b.len() - 1
    }

    pub fn b_series(&self) -> EgfSeries {
        EgfSeries::from_counts(&self.b)
    }

    pub fn c_series(&self) -> EgfSeries {
        EgfSeries::from_counts(&self.c)
    }
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Labelled product: `(a ⋆ b)(n) = Σ_j binom(n, j) a(j) b(n − j)`, up to `order`.
fn egf_mul(a: &[BigInt], b: &[BigInt], order: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); order + 1];
    for (n, slot) in out.iter_mut().enumerate() {
        let mut row = BigInt::one();
        for j in 0..=n {
            if j > 0 {
                row = row * (n - j + 1) / j;
            }
            let (Some(x), Some(y)) = (a.get(j), b.get(n - j)) else {
                continue;
            };
            if x.is_zero() || y.is_zero() {
                continue;
            }
            *slot += &row * x * y;
        }
    }
    out
}

/// `exp(b)` for `b(0) = 0`, via `e(n) = Σ_{j=1}^{n} binom(n−1, j−1) b(j) e(n−j)`.
fn egf_exp(b: &[BigInt], order: usize) -> Vec<BigInt> {
    let mut e = vec![BigInt::zero(); order + 1];
    e[0] = BigInt::one();
    for n in 1..=order {
        let mut acc = BigInt::zero();
        let mut row = BigInt::one();
        for j in 1..=n {
            if j > 1 {
                row = row * (n - j + 1) / (j - 1);
            }
            if let Some(bj) = b.get(j) {
                if !bj.is_zero() {
                    acc += &row * bj * &e[n - j];
                }
            }
        }
        e[n] = acc;
    }
    e
}

/// `Σ_{i ∈ set} b^i / i!` for `b(0) = 0`, truncated at `order`.
fn egf_set_sum(set: &DegreeSet, b: &[BigInt], order: usize) -> Vec<BigInt> {
    if set.is_full() {
        return egf_exp(b, order);
    }
    let mut out = vec![BigInt::zero(); order + 1];
    // q holds b^i / i!; it has valuation i, so powers beyond `order` vanish.
    let mut q = vec![BigInt::zero(); order + 1];
    q[0] = BigInt::one();
    for i in 0..=order {
        if i > 0 {
            q = egf_mul(b, &q, order);
            for x in q.iter_mut() {
                debug_assert!((&*x % i).is_zero());
                *x /= i;
            }
        }
        if set.contains(i) {
            for (o, x) in out.iter_mut().zip(&q) {
                *o += x;
            }
        }
    }
    out
}

fn egf_pow(a: &[BigInt], k: usize, order: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); order + 1];
    acc[0] = BigInt::one();
    for _ in 0..k {
        acc = egf_mul(&acc, a, order);
    }
    acc
}

/// Exact counts `b(n)`, `c°(n)`, `c(n)` for `n ≤ max_n`.
///
/// Fixed-point iteration of `B = x φ(B)^k` from `B = 0`. If the current
/// iterate agrees with the solution up to order `t`, then `φ(B)^k` is correct
/// up to order `t` and multiplying by `x` makes the next iterate correct up to
/// `t + 1`; so `max_n + 1` rounds suffice. Round `t` only needs order `t`.
pub fn labelled_counts(k: usize, omega: &OmegaSet, max_n: usize) -> LabelledCounts {
    let out_set = omega.out();
    let mut b = vec![BigInt::zero(); max_n + 1];
    for t in 1..=max_n + 1 {
        let order = t.min(max_n);
        let phi_k = egf_pow(&egf_set_sum(&out_set, &b, order), k, order);
        let mut next = vec![BigInt::zero(); max_n + 1];
        // n! [xⁿ] x F(x) = n (n−1)! [x^{n−1}] F(x)
        for n in 1..=order {
            next[n] = &phi_k[n - 1] * n;
        }
        next[order + 1..].clone_from_slice(&b[order + 1..]);
        b = next;
    }
    let c_circ = egf_set_sum(&out_set, &b, max_n);
    let c = egf_set_sum(omega.as_set(), &b, max_n);
    LabelledCounts { b, c_circ, c }
}

/// Number of Ω-k-trees with `n` hedra rooted at a front, `binom(n+k,k) c(n) / (kn+1)`.
pub fn partial_ktree_count(k: usize, omega: &OmegaSet, n: usize) -> Result<BigInt, SeriesError> {
    if n == 0 {
        return Err(SeriesError::ZeroSize);
    }
    let counts = labelled_counts(k, omega, n);
    par_from_c(k, n, &counts.c[n])
}

fn par_from_c(k: usize, n: usize, c: &BigInt) -> Result<BigInt, SeriesError> {
    let num = binomial(n + k, k) * c;
    let (q, r) = num.div_rem(&BigInt::from(k * n + 1));
    if !r.is_zero() {
        return Err(SeriesError::DivisibilityViolation { n });
    }
    Ok(q)
}

/// One row of [`count_table`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRow {
    pub n: usize,
    #[serde(serialize_with = "ser_bigint")]
    pub b: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub c: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub par: BigInt,
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `(n, b(n), c(n), Par(n))` for `1 ≤ n ≤ max_n`.
pub fn count_table(k: usize, omega: &OmegaSet, max_n: usize) -> Result<Vec<CountRow>, SeriesError> {
    let counts = labelled_counts(k, omega, max_n);
    (1..=max_n)
        .map(|n| {
            Ok(CountRow {
                n,
                b: counts.b[n].clone(),
                c: counts.c[n].clone(),
                par: par_from_c(k, n, &counts.c[n])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormRow {
    pub n: usize,
    pub b_ok: bool,
    pub c_ok: bool,
    pub par_ok: bool,
}

impl ClosedFormRow {
    pub fn passed(&self) -> bool {
        self.b_ok && self.c_ok && self.par_ok
    }
}

/// Compares the Ω = ℕ₀ counts against `(kn)^{n−1}`, `(kn+1)^{n−1}` and
/// `binom(n+k,k) (kn+1)^{n−2}`.
pub fn closed_form_check(k: usize, max_n: usize) -> Vec<ClosedFormRow> {
    let counts = labelled_counts(k, &OmegaSet::full(), max_n);
    (1..=max_n)
        .map(|n| {
            let kn = BigInt::from(k * n);
            let kn1 = BigInt::from(k * n + 1);
            let b_expected = num_traits::pow(kn, n - 1);
            let c_expected = num_traits::pow(kn1.clone(), n - 1);
            let par_ok = match par_from_c(k, n, &counts.c[n]) {
                Ok(par) => {
                    // (kn+1)^{n−2} is fractional at n = 1; compare cross-multiplied.
                    let lhs = par * &kn1;
                    let rhs = binomial(n + k, k) * num_traits::pow(kn1, n - 1);
                    lhs == rhs
                }
                Err(_) => false,
            };
            ClosedFormRow {
                n,
                b_ok: counts.b[n] == b_expected,
                c_ok: counts.c[n] == c_expected,
                par_ok,
            }
        })
        .collect()
}

/// Unlabeled counts for Ω = ℕ₀.
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledCounts {
    /// `A(z) = z exp(Σ_{j≥1} k A(z^j) / j)`: reduced coding-tree shapes by black count.
    pub reduced: OgfSeries,
    /// `exp(Σ_{j≥1} A(z^j) / j)`: shapes with an arbitrary root white node.
    pub rooted: OgfSeries,
}

/// Unlabeled coding-tree shapes for Ω = ℕ₀, where the k white children of a
/// black node are distinguishable and the black children of a white node
/// form a multiset.
pub fn unlabeled_counts(k: usize, omega: &OmegaSet, max_n: usize) -> Result<UnlabeledCounts, SeriesError> {
    if !omega.is_full() {
        return Err(SeriesError::UnsupportedOmega);
    }
    let mut a = vec![BigInt::zero(); max_n + 1];
    // a(n) depends on a(1..n−1) only, so one ordered sweep is the fixed point.
    for n in 1..=max_n {
        a[n] = multiset_exp(&a, k, n - 1).swap_remove(n - 1);
    }
    let rooted = multiset_exp(&a, 1, max_n);
    Ok(UnlabeledCounts {
        reduced: OgfSeries { coeffs: a },
        rooted: OgfSeries { coeffs: rooted },
    })
}

/// `exp(Σ_{j≥1} mult · a(z^j) / j)` up to `order`, for `a(0) = 0`.
///
/// With `s(n) = Σ_{d | n} d · mult · a(d)`, the coefficients obey
/// `n e(n) = Σ_{m=1}^{n} s(m) e(n−m)`.
fn multiset_exp(a: &[BigInt], mult: usize, order: usize) -> Vec<BigInt> {
    let s: Vec<BigInt> = (0..=order)
        .map(|n| {
            if n == 0 {
                return BigInt::zero();
            }
            (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| a.get(d).cloned().unwrap_or_default() * d * mult)
                .sum()
        })
        .collect();
    let mut e = vec![BigInt::zero(); order + 1];
    e[0] = BigInt::one();
    for n in 1..=order {
        let acc: BigInt = (1..=n).map(|m| &s[m] * &e[n - m]).sum();
        debug_assert!((&acc % n).is_zero());
        e[n] = acc / n;
    }
    e
}

/// Diagnostic `r(n) = b(n) ρⁿ n^{3/2} / n!`, which flattens to a constant.
pub fn subexponential_ratio(params: &ModelParams, max_n: usize) -> Vec<f64> {
    let counts = labelled_counts(params.k, &params.omega, max_n);
    let ln_rho = params.rho.ln();
    let mut ln_fact = 0.0;
    (0..=max_n)
        .map(|n| {
            if n > 0 {
                ln_fact += (n as f64).ln();
            }
            match ln_big(&counts.b[n]) {
                Some(lb) => (lb + n as f64 * ln_rho + 1.5 * (n as f64).ln() - ln_fact).exp(),
                None => 0.0,
            }
        })
        .collect()
}

/// Natural log of a positive big integer.
pub fn ln_big(x: &BigInt) -> Option<f64> {
    if x <= &BigInt::zero() {
        return None;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().map(f64::ln);
    }
    let shift = bits - 900;
    let top = (x >> shift).to_f64()?;
    Some(top.ln() + shift as f64 * std::f64::consts::LN_2)
}

/// `c(n)` as `f64`, for probability computations; `+∞` on overflow.
pub fn to_f64_lossy(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

//! Empirical spectral distributions, the semicircle law, ∞-Wasserstein
//! distance and quantitative majorization.
//!
//! Rearrangements are always non-increasing.

use crate::error::{Error, Result};

/// Equal-weight atoms (weight 1/n each).
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::input("empirical measure needs at least one atom"));
        }
        if atoms.iter().any(|a| !a.is_finite()) {
            return Err(Error::input("non-finite atom"));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    fn sorted_ascending(&self) -> Vec<f64> {
        let mut v = self.atoms.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Real vector with zero sum, up to 1e-10·(1 + max|xᵢ|).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceZeroVector {
    values: Vec<f64>,
}

impl TraceZeroVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite entry"));
        }
        let sum: f64 = values.iter().sum();
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if sum.abs() > 1e-10 * (1.0 + scale) {
            return Err(Error::input(format!(
                "vector does not sum to zero (sum {sum:e})"
            )));
        }
        Ok(Self { values })
    }

    /// Subtracts the mean.
    pub fn project(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Ok(Self { values });
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Self::new(values.into_iter().map(|v| v - mean).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Partial sums of the non-increasing rearrangement, k = 1..n.
    fn partial_sums(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v.iter()
            .scan(0.0, |acc, x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    }
}

/// A distribution with a continuous, strictly increasing CDF on a bounded
/// support interval.
pub trait ContinuousCdf {
    fn cdf(&self, x: f64) -> f64;
    fn support(&self) -> (f64, f64);
}

/// Standard semicircle law, density √(4 − x²)/(2π) on [−2, 2].
#[derive(Debug, Clone, Copy, Default)]
pub struct Semicircle;

impl ContinuousCdf for Semicircle {
    fn cdf(&self, x: f64) -> f64 {
        semicircle_cdf(x)
    }

    fn support(&self) -> (f64, f64) {
        (-2.0, 2.0)
    }
}

pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * std::f64::consts::PI)
    }
}

/// F_sc(x) = 1/2 + (x√(4−x²)/4 + arcsin(x/2))/π on [−2, 2].
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        let v = 0.5 + (x * (4.0 - x * x).sqrt() / 4.0 + (x / 2.0).asin()) / std::f64::consts::PI;
        v.clamp(0.0, 1.0)
    }
}

/// Inverse of [`semicircle_cdf`] on (0, 1), by bisection on [−2, 2].
pub fn semicircle_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "quantile level must lie in (0, 1), got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (-2.0_f64, 2.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if semicircle_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// X_n^sc: entry k (k = 1..n, increasing) is the semicircle quantile at
/// level (2k − 1)/(2n). Antisymmetrized so the sum is exactly zero.
pub fn ideal_semicircular_vector(n: usize) -> Result<TraceZeroVector> {
    if n == 0 {
        return Err(Error::input("n must be at least 1"));
    }
    let mut v = Vec::with_capacity(n);
    for k in 1..=n {
        v.push(semicircle_quantile((2 * k - 1) as f64 / (2 * n) as f64)?);
    }
    for k in 0..n / 2 {
        let a = 0.5 * (v[n - 1 - k] - v[k]);
        v[k] = -a;
        v[n - 1 - k] = a;
    }
    if n % 2 == 1 {
        v[n / 2] = 0.0;
    }
    TraceZeroVector::new(v)
}

/// d∞ between two n-atom empirical measures: the sorted (monotone) coupling
/// is optimal.
pub fn dinf_empirical_empirical(x: &EmpiricalMeasure, y: &EmpiricalMeasure) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::input(format!(
            "d∞ between measures with {} and {} atoms is not supported",
            x.len(),
            y.len()
        )));
    }
    Ok(x.sorted_ascending()
        .iter()
        .zip(y.sorted_ascending())
        .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// d∞ between an empirical measure and a continuous law: the smallest ε with
/// F(t − ε) ≤ G(t) ≤ F(t + ε) for all t, where G is the empirical CDF.
/// Because G is a step function and F is monotone, the bracketing only needs
/// checking at the atoms: F(x₍ₖ₎ + ε) ≥ G(x₍ₖ₎) and F(x₍ₖ₎ − ε) ≤ G(x₍ₖ₎⁻).
/// ε is found by bisection to 1e-12.
pub fn dinf_empirical_continuous(x: &EmpiricalMeasure, law: &impl ContinuousCdf) -> f64 {
    let atoms = x.sorted_ascending();
    let n = atoms.len() as f64;
    let (a, b) = law.support();

    // (atom, G at atom, G just below atom), ties collapsed
    let mut critical = Vec::with_capacity(atoms.len());
    let mut i = 0;
    while i < atoms.len() {
        let mut j = i;
        while j + 1 < atoms.len() && atoms[j + 1] == atoms[i] {
            j += 1;
        }
        critical.push((atoms[i], (j + 1) as f64 / n, i as f64 / n));
        i = j + 1;
    }

    let feasible = |eps: f64| {
        critical
            .iter()
            .all(|&(t, g_at, g_below)| law.cdf(t + eps) >= g_at && law.cdf(t - eps) <= g_below)
    };

    let mut hi = atoms
        .iter()
        .fold(0.0_f64, |m, &t| m.max((t - a).abs()).max((t - b).abs()));
    let mut lo = 0.0;
    if feasible(lo) {
        return 0.0;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn check_same_len(x: &TraceZeroVector, y: &TraceZeroVector) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::input(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// x ≺ y: every partial sum of x↓ is at most the matching partial sum of y↓
/// (slack 1e-12·(1 + Σ|yᵢ|) for rounding).
pub fn majorizes(x: &TraceZeroVector, y: &TraceZeroVector) -> Result<bool> {
    check_same_len(x, y)?;
    let tol = 1e-12 * (1.0 + y.values.iter().map(|v| v.abs()).sum::<f64>());
    Ok(x.partial_sums()
        .iter()
        .zip(y.partial_sums())
        .all(|(sx, sy)| *sx <= sy + tol))
}

/// δ(x, y): the smallest c > 0 with x ≺ c·y, equal to
/// max_{1≤k<n} S_x(k)/S_y(k). Partial sums of a nonzero trace-zero vector are
/// strictly positive for k < n, so the ratio is well defined.
pub fn majorization_gauge(x: &TraceZeroVector, y: &TraceZeroVector) -> Result<f64> {
    check_same_len(x, y)?;
    if y.is_zero() {
        return Err(Error::domain("majorization gauge against the zero vector"));
    }
    if x.is_zero() {
        return Ok(0.0);
    }
    let sx = x.partial_sums();
    let sy = y.partial_sums();
    let n = x.len();
    let mut delta = 0.0_f64;
    for k in 0..n - 1 {
        if sy[k] <= 0.0 {
            return Err(Error::domain(
                "non-positive partial sum in a nonzero trace-zero vector",
            ));
        }
        delta = delta.max(sx[k] / sy[k]);
    }
    Ok(delta)
}

/// (α, β) = (δ(spec, X_n^sc), δ(X_n^sc, spec)) for an already rescaled
/// trace-zero spectrum.
pub fn alpha_beta(spec: &TraceZeroVector) -> Result<(f64, f64)> {
    let ideal = ideal_semicircular_vector(spec.len())?;
    alpha_beta_with(spec, &ideal)
}

/// As [`alpha_beta`] with a precomputed ideal vector.
pub fn alpha_beta_with(spec: &TraceZeroVector, ideal: &TraceZeroVector) -> Result<(f64, f64)> {
    Ok((
        majorization_gauge(spec, ideal)?,
        majorization_gauge(ideal, spec)?,
    ))
}

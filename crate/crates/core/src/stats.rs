//! Monte-Carlo summaries, binomial intervals and the two-sample
//! Kolmogorov–Smirnov test.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::SeededStream;

/// Monte-Carlo mean with its standard error and provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
}

impl EstimateWithCI {
    pub fn from_samples(samples: &[f64], seed: u64) -> Self {
        let (mean, sd) = mean_and_std(samples);
        let n = samples.len();
        Self {
            mean,
            stderr: if n > 0 {
                sd / (n as f64).sqrt()
            } else {
                f64::NAN
            },
            trials: n,
            seed,
        }
    }

    /// |a − b| ≤ k·√(se_a² + se_b²).
    pub fn consistent_with(&self, other: &Self, k: f64) -> bool {
        (self.mean - other.mean).abs() <= k * self.stderr.hypot(other.stderr)
    }
}

/// Mean and sample standard deviation (n − 1 denominator).
pub fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the endpoints are exact at 0 and n successes; avoid rounding residue
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes >= trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Binomial standard error √(p(1−p)/n).
pub fn binomial_se(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Result of a two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

impl KsTest {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Two-sample KS statistic with the asymptotic Kolmogorov p-value
/// (Stephens' small-sample correction on the effective size).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsTest {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let t = x[i].min(y[j]);
        while i < n && x[i] <= t {
            i += 1;
        }
        while j < m && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    KsTest {
        statistic: d,
        p_value: kolmogorov_survival(lambda),
    }
}

/// Q_KS(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²).
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let term = sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 * sum.abs().max(1e-300) {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Evaluates `f` on child streams `0..trials` of `stream` in parallel and
/// returns results in trial order.
pub fn map_trials<T, F>(trials: usize, stream: SeededStream, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, SeededStream) -> T + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map(|i| f(i, stream.child(i as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn wilson_known_values() {
        // 50/100: center 0.5, half-width ≈ 0.0962
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.2 && hi < 0.35);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Q(1.36) ≈ 0.049, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_survival(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_survival(1.63) - 0.0098).abs() < 5e-4);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
    }

    #[test]
    fn ks_identical_and_shifted() {
        let a: Vec<f64> = (0..500).map(|i| i as f64 / 500.0).collect();
        let t = ks_two_sample(&a, &a);
        assert_eq!(t.statistic, 0.0);
        let b: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        let t = ks_two_sample(&a, &b);
        assert!((t.statistic - 0.5).abs() < 1e-2);
        assert!(t.rejects(0.01));
    }

    #[test]
    fn wilson_coverage_on_bernoulli() {
        let p = 0.3;
        let n = 200;
        let reps = 1000;
        let stream = SeededStream::new(2024, 0);
        let covered: usize = map_trials(reps, stream, |_, s| {
            let mut g = s.gaussian();
            let k = (0..n).filter(|_| g.uniform() < p).count();
            let (lo, hi) = wilson_interval(k, n);
            usize::from(lo <= p && p <= hi)
        })
        .into_iter()
        .sum();
        let cov = covered as f64 / reps as f64;
        assert!((0.92..=0.98).contains(&cov), "coverage {cov}");
    }

    #[test]
    fn trials_are_ordered_and_reproducible() {
        let s = SeededStream::new(1, 1);
        let a = map_trials(100, s, |i, st| (i, st.seed()));
        let b = map_trials(100, s, |i, st| (i, st.seed()));
        assert_eq!(a, b);
        assert!(a.iter().enumerate().all(|(k, &(i, _))| k == i));
    }
}

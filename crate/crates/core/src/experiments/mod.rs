//! Batch experiments: threshold scans, concentration and GUE-approximation
//! runs, coupled monotonicity checks and spectral sweeps.
//!
//! Every scan point owns the stream `SeededStream::new(master_seed, s)` and
//! every trial a child of it, so a row can be recomputed from the master
//! seed alone regardless of grid or thread count.

mod config;
mod persist;

pub use config::{Criterion, ExperimentConfig, ExperimentKind, SValues, ToleranceOverrides};
pub use persist::{configure_threads_from_env, run_config, sha256_hex, RunSummary};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ensembles::{
    coupled_partial_trace_sample, coupled_projection_sample, sample_gue, sample_gue0,
    sample_induced_on, sample_induced_state, DensityMatrix, EnsembleKind,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, HermitianOperator, ProductDims, TracelessHermitian};
use crate::rng::SeededStream;
use crate::separability::{
    gauge_d0, gauge_ppt0, gauge_s0_relative, min_pt_eigenvalue, DEFAULT_RELATIVE_TOL, PSD_TOLERANCE,
};
use crate::spectral::{
    alpha_beta, dinf_empirical_continuous, EmpiricalMeasure, Semicircle, TraceZeroVector,
};
use crate::stats::{
    binomial_se, map_trials, mean_and_std, median, wilson_interval, EstimateWithCI,
};

/// Centred body whose gauge an experiment measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeBody {
    D0,
    Ppt0,
    Hs,
    S0,
}

impl FromStr for GaugeBody {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d0" => Ok(Self::D0),
            "ppt0" => Ok(Self::Ppt0),
            "hs" => Ok(Self::Hs),
            "s0" => Ok(Self::S0),
            other => Err(Error::input(format!(
                "unknown body '{other}' (expected d0, ppt0, hs or s0)"
            ))),
        }
    }
}

impl fmt::Display for GaugeBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::D0 => "d0",
            Self::Ppt0 => "ppt0",
            Self::Hs => "hs",
            Self::S0 => "s0",
        })
    }
}

/// ‖A‖_K for the chosen body; `hs` is the Hilbert–Schmidt norm.
pub fn body_gauge(
    body: GaugeBody,
    a: &TracelessHermitian,
    dims: &ProductDims,
    rel_tol: f64,
) -> Result<f64> {
    match body {
        GaugeBody::D0 => gauge_d0(a),
        GaugeBody::Ppt0 => gauge_ppt0(a, dims),
        GaugeBody::Hs => Ok(a.hs_norm()),
        GaugeBody::S0 => Ok(gauge_s0_relative(a, dims, rel_tol)?.value),
    }
}

fn check_body_dims(body: GaugeBody, dims: &ProductDims) -> Result<()> {
    match body {
        GaugeBody::S0 if !matches!(dims.factors(), [2, 2] | [2, 3] | [3, 2]) => {
            Err(Error::unsupported(
                dims.factors(),
                "the S₀ gauge is only available for 2x2 and 2x3 systems",
            ))
        }
        GaugeBody::Ppt0 if !dims.is_bipartite() => {
            Err(Error::input("the PPT₀ gauge needs a bipartite split"))
        }
        _ => Ok(()),
    }
}

/// Stream of one scan point.
pub fn point_stream(master_seed: u64, s: usize) -> SeededStream {
    SeededStream::new(master_seed, s as u64)
}

/// One row of a threshold scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRecord {
    pub s: usize,
    pub trials: usize,
    pub successes: usize,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ScanRecord {
    pub fn from_counts(s: usize, successes: usize, trials: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials);
        Self {
            s,
            trials,
            successes,
            p_hat: successes as f64 / trials as f64,
            ci_low,
            ci_high,
        }
    }

    pub fn stderr(&self) -> f64 {
        binomial_se(self.p_hat, self.trials)
    }
}

/// A validated threshold-scan request.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPlan {
    pub dims: ProductDims,
    pub s_values: Vec<usize>,
    pub trials: usize,
    pub criterion: Criterion,
    /// States count as PPT when λ_min(ρ^Γ) ≥ psd_tolerance.
    pub psd_tolerance: f64,
    pub master_seed: u64,
}

impl ScanPlan {
    pub fn new(
        dims: ProductDims,
        s_values: Vec<usize>,
        trials: usize,
        criterion: Criterion,
        master_seed: u64,
    ) -> Result<Self> {
        let plan = Self {
            dims,
            s_values,
            trials,
            criterion,
            psd_tolerance: PSD_TOLERANCE,
            master_seed,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.dims.is_bipartite() {
            return Err(Error::input("threshold scans need a bipartite split"));
        }
        if self.trials == 0 {
            return Err(Error::input("trials must be at least 1"));
        }
        if self.s_values.is_empty() || self.s_values.contains(&0) {
            return Err(Error::input("s values must be non-empty and positive"));
        }
        if self.criterion == Criterion::Exact && !criterion_exact_allowed(&self.dims) {
            return Err(Error::unsupported(
                self.dims.factors(),
                "the exact criterion is only available for 2x2 and 2x3; use ppt",
            ));
        }
        Ok(())
    }
}

pub(crate) fn criterion_exact_allowed(dims: &ProductDims) -> bool {
    matches!(dims.factors(), [2, 2] | [2, 3] | [3, 2])
}

fn ppt_with(rho: &DensityMatrix, tol: f64) -> Result<bool> {
    Ok(min_pt_eigenvalue(rho)? >= tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub dims: Vec<usize>,
    pub criterion: Criterion,
    pub records: Vec<ScanRecord>,
    /// First s with p̂ ≥ 1/2 and ci_low ≥ 0.4, interpolated.
    pub crossing: Option<f64>,
    /// Adjacent grid points never drop by more than 2σ.
    pub monotone_within_2sigma: bool,
    /// PPT scans with d ≥ 3: grid points with p̂ ≥ 0.9 and s < d³.
    pub bound_entanglement_window: Option<Vec<usize>>,
}

impl ScanResult {
    /// Name of the probability column: PPT scans never claim separability.
    pub fn probability_label(&self) -> &'static str {
        self.criterion.probability_label()
    }
}

/// Linear interpolation to p̂ = 1/2 before the first grid point that passes
/// p̂ ≥ 1/2 with ci_low ≥ 0.4.
pub fn crossing_point(records: &[ScanRecord]) -> Option<f64> {
    let i = records
        .iter()
        .position(|r| r.p_hat >= 0.5 && r.ci_low >= 0.4)?;
    if i == 0 {
        return Some(records[0].s as f64);
    }
    let (a, b) = (&records[i - 1], &records[i]);
    if b.p_hat <= a.p_hat {
        return Some(b.s as f64);
    }
    let t = ((0.5 - a.p_hat) / (b.p_hat - a.p_hat)).clamp(0.0, 1.0);
    Some(a.s as f64 + t * (b.s as f64 - a.s as f64))
}

/// p̂ does not drop by more than k combined standard errors between
/// consecutive grid points.
pub fn monotone_within(records: &[ScanRecord], k: f64) -> bool {
    records
        .windows(2)
        .all(|w| w[1].p_hat >= w[0].p_hat - k * w[0].stderr().hypot(w[1].stderr()))
}

/// Runs a threshold scan, handing each finished record to `on_record`.
pub fn threshold_scan_with<F>(plan: &ScanPlan, mut on_record: F) -> Result<ScanResult>
where
    F: FnMut(&ScanRecord) -> Result<()>,
{
    plan.validate()?;
    let mut s_values = plan.s_values.clone();
    s_values.sort_unstable();
    s_values.dedup();
    let mut records = Vec::with_capacity(s_values.len());
    for &s in &s_values {
        let hits = map_trials(plan.trials, point_stream(plan.master_seed, s), |_, st| {
            sample_induced_on(plan.dims.clone(), s, st)
                .and_then(|rho| ppt_with(&rho, plan.psd_tolerance))
        });
        let mut successes = 0;
        for h in hits {
            successes += usize::from(h?);
        }
        let rec = ScanRecord::from_counts(s, successes, plan.trials);
        on_record(&rec)?;
        records.push(rec);
    }
    let d = plan.dims.factors()[0].min(plan.dims.factors()[1]);
    let window = (plan.criterion == Criterion::Ppt && d >= 3).then(|| {
        records
            .iter()
            .filter(|r| r.p_hat >= 0.9 && r.s < d * d * d)
            .map(|r| r.s)
            .collect()
    });
    Ok(ScanResult {
        dims: plan.dims.factors().to_vec(),
        criterion: plan.criterion,
        crossing: crossing_point(&records),
        monotone_within_2sigma: monotone_within(&records, 2.0),
        bound_entanglement_window: window,
        records,
    })
}

pub fn threshold_scan(plan: &ScanPlan) -> Result<ScanResult> {
    threshold_scan_with(plan, |_| Ok(()))
}

/// Summary of ‖ρ − Id/n‖_K over trials at one s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeSummary {
    pub s: usize,
    pub trials: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub stderr: f64,
    pub min: f64,
}

fn summarize(s: usize, values: &[f64]) -> GaugeSummary {
    let (mean, std) = mean_and_std(values);
    GaugeSummary {
        s,
        trials: values.len(),
        mean,
        median: median(values),
        std,
        stderr: std / (values.len() as f64).sqrt(),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// Gauges of centred induced states at environment dimension s.
pub fn induced_gauges(
    dims: &ProductDims,
    s: usize,
    body: GaugeBody,
    trials: usize,
    stream: SeededStream,
) -> Result<Vec<f64>> {
    check_body_dims(body, dims)?;
    if trials == 0 || s == 0 {
        return Err(Error::input("trials and s must be positive"));
    }
    map_trials(trials, stream, |_, st| {
        let rho = sample_induced_on(dims.clone(), s, st)?;
        body_gauge(body, &rho.centered(), dims, DEFAULT_RELATIVE_TOL)
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationSummary {
    pub body: GaugeBody,
    pub at_s: GaugeSummary,
    pub at_4s: GaugeSummary,
    /// std(s)/std(4s); ≈ 2 when fluctuations scale like 1/√s.
    pub std_ratio: f64,
}

/// Gauge fluctuations at s and 4s; trials at s use child stream 0 of
/// `stream` and trials at 4s child stream 1.
pub fn concentration_experiment(
    dims: &ProductDims,
    s: usize,
    body: GaugeBody,
    trials: usize,
    stream: SeededStream,
) -> Result<ConcentrationSummary> {
    let a = induced_gauges(dims, s, body, trials, stream.child(0))?;
    let b = induced_gauges(dims, 4 * s, body, trials, stream.child(1))?;
    let (at_s, at_4s) = (summarize(s, &a), summarize(4 * s, &b));
    Ok(ConcentrationSummary {
        body,
        at_s,
        at_4s,
        std_ratio: at_s.std / at_4s.std,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GueApproxResult {
    pub n: usize,
    pub s: usize,
    pub body: GaugeBody,
    /// R(n, s) = n√s·E‖ρ − Id/n‖_K / E‖G‖_K.
    pub ratio: f64,
    pub ratio_se: f64,
    pub state_gauge: EstimateWithCI,
    pub gue_gauge: EstimateWithCI,
}

/// Compares the centred induced state with a rescaled GUE⁰ matrix through
/// the gauge of `body`. States use child stream 0, GUE⁰ draws child stream 1.
pub fn gue_approx_experiment(
    dims: &ProductDims,
    s: usize,
    body: GaugeBody,
    trials: usize,
    stream: SeededStream,
) -> Result<GueApproxResult> {
    if trials < 2 {
        return Err(Error::input("need at least two trials"));
    }
    let n = dims.total();
    let state_vals = induced_gauges(dims, s, body, trials, stream.child(0))?;
    let gue_vals: Vec<f64> = map_trials(trials, stream.child(1), |_, st| {
        body_gauge(body, &sample_gue0(n, st)?, dims, DEFAULT_RELATIVE_TOL)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let seed = stream.seed();
    let state = EstimateWithCI::from_samples(&state_vals, seed);
    let gue = EstimateWithCI::from_samples(&gue_vals, seed);
    let scale = n as f64 * (s as f64).sqrt();
    let ratio = scale * state.mean / gue.mean;
    Ok(GueApproxResult {
        n,
        s,
        body,
        ratio,
        ratio_se: ratio.abs() * (state.stderr / state.mean).hypot(gue.stderr / gue.mean),
        state_gauge: state,
        gue_gauge: gue,
    })
}

/// Outcome of one coupled sampler run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingReport {
    pub trials: usize,
    /// Local dimension and environment of the larger and smaller states.
    pub d_large: usize,
    pub s_large: usize,
    pub d_small: usize,
    pub s_small: usize,
    /// PPT frequency of the larger state.
    pub p_larger: f64,
    /// PPT (= separability at 2×2, 2×3) frequency of the smaller state.
    pub p_smaller: f64,
    /// Coupled draws with the larger state PPT and the smaller one not.
    pub violations: usize,
    pub resamples: usize,
    /// p_smaller ≥ p_larger − 2σ.
    pub holds: bool,
    /// Uncoupled estimates from the direct samplers.
    pub direct_larger: f64,
    pub direct_smaller: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub projection: CouplingReport,
    pub partial_trace: CouplingReport,
}

fn coupling_report<S>(
    trials: usize,
    (d_large, s_large): (usize, usize),
    (d_small, s_small): (usize, usize),
    stream: SeededStream,
    sampler: S,
) -> Result<CouplingReport>
where
    S: Fn(SeededStream) -> Result<crate::ensembles::CoupledStates> + Sync + Send,
{
    let flags: Vec<(bool, bool, usize)> = map_trials(trials, stream.child(0), |_, st| {
        let c = sampler(st)?;
        Ok((
            ppt_with(&c.larger, PSD_TOLERANCE)?,
            ppt_with(&c.smaller, PSD_TOLERANCE)?,
            c.resamples,
        ))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let big = flags.iter().filter(|f| f.0).count();
    let small = flags.iter().filter(|f| f.1).count();
    let violations = flags.iter().filter(|f| f.0 && !f.1).count();
    let resamples = flags.iter().map(|f| f.2).sum();
    let direct = |d: usize, s: usize, st: SeededStream| -> Result<f64> {
        let dims = ProductDims::bipartite(d, d)?;
        let hits: Vec<bool> = map_trials(trials, st, |_, t| {
            ppt_with(&sample_induced_on(dims.clone(), s, t)?, PSD_TOLERANCE)
        })
        .into_iter()
        .collect::<Result<_>>()?;
        Ok(hits.iter().filter(|&&h| h).count() as f64 / trials as f64)
    };
    let n = trials as f64;
    let (p_larger, p_smaller) = (big as f64 / n, small as f64 / n);
    let sigma = binomial_se(p_larger, trials).hypot(binomial_se(p_smaller, trials));
    Ok(CouplingReport {
        trials,
        d_large,
        s_large,
        d_small,
        s_small,
        p_larger,
        p_smaller,
        violations,
        resamples,
        holds: p_smaller >= p_larger - 2.0 * sigma,
        direct_larger: direct(d_large, s_large, stream.child(1))?,
        direct_smaller: direct(d_small, s_small, stream.child(2))?,
    })
}

/// Both monotonicity couplings: the local-projection coupling between local
/// dimensions d1 ≤ d2 at environment s, and the partial-trace coupling
/// between (2·d1, s) and (d1, 4s).
pub fn monotonicity_experiment(
    d1: usize,
    d2: usize,
    s: usize,
    trials: usize,
    stream: SeededStream,
) -> Result<MonotonicityReport> {
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    let projection = coupling_report(trials, (d2, s), (d1, s), stream.child(0), |st| {
        coupled_projection_sample(d1, d2, s, st)
    })?;
    let partial_trace = coupling_report(trials, (2 * d1, s), (d1, 4 * s), stream.child(1), |st| {
        coupled_partial_trace_sample(d1, s, st)
    })?;
    Ok(MonotonicityReport {
        projection,
        partial_trace,
    })
}

/// One per-trial row of a spectral sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralRow {
    pub trial: usize,
    pub n: usize,
    /// Environment dimension; empty for the Gaussian ensembles.
    pub s: Option<usize>,
    pub ensemble: EnsembleKind,
    pub dinf: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
}

/// Rescaled spectrum of one draw: G/√n for the Gaussian ensembles and
/// √(ns)(ρ − Id/n) for induced states.
pub fn rescaled_spectrum(
    kind: EnsembleKind,
    n: usize,
    s: Option<usize>,
    stream: SeededStream,
) -> Result<Vec<f64>> {
    let (op, scale): (HermitianOperator, f64) = match kind {
        EnsembleKind::Gue => (sample_gue(n, stream)?, 1.0 / (n as f64).sqrt()),
        EnsembleKind::Gue0 => (
            sample_gue0(n, stream)?.into_operator(),
            1.0 / (n as f64).sqrt(),
        ),
        EnsembleKind::Induced | EnsembleKind::Uniform => {
            let s = if kind == EnsembleKind::Uniform {
                n
            } else {
                s.ok_or_else(|| Error::input("induced spectra need s"))?
            };
            let rho = sample_induced_state(n, s, stream)?;
            (rho.centered().into_operator(), ((n * s) as f64).sqrt())
        }
        EnsembleKind::Ginibre => return Err(Error::input("ginibre matrices are not self-adjoint")),
    };
    Ok(hermitian_eigenvalues(&op)?
        .as_slice()
        .iter()
        .map(|l| l * scale)
        .collect())
}

/// d∞ to the semicircle, the majorization statistics α, β against the ideal
/// vector, and the extreme eigenvalues, for `trials` rescaled draws.
pub fn spectral_experiment(
    kind: EnsembleKind,
    n: usize,
    s: Option<usize>,
    trials: usize,
    stream: SeededStream,
) -> Result<Vec<SpectralRow>> {
    if n < 2 || trials == 0 {
        return Err(Error::input("need n ≥ 2 and at least one trial"));
    }
    let s_field = match kind {
        EnsembleKind::Induced => Some(s.ok_or_else(|| Error::input("induced spectra need s"))?),
        EnsembleKind::Uniform => Some(n),
        _ => None,
    };
    map_trials(trials, stream, |trial, st| {
        let spec = rescaled_spectrum(kind, n, s_field, st)?;
        let dinf = dinf_empirical_continuous(&EmpiricalMeasure::new(spec.clone())?, &Semicircle);
        let (alpha, beta) = alpha_beta(&TraceZeroVector::project(spec.clone())?)?;
        Ok(SpectralRow {
            trial,
            n,
            s: s_field,
            ensemble: kind,
            dinf,
            alpha,
            beta,
            lambda_max: spec[0],
            lambda_min: spec[spec.len() - 1],
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(s: usize, k: usize, n: usize) -> ScanRecord {
        ScanRecord::from_counts(s, k, n)
    }

    #[test]
    fn crossing_interpolates() {
        let r = [
            rec(10, 100, 1000),
            rec(20, 300, 1000),
            rec(30, 700, 1000),
            rec(40, 900, 1000),
        ];
        assert!((crossing_point(&r).unwrap() - 25.0).abs() < 1e-12);
        assert_eq!(crossing_point(&r[..2]), None);
        assert_eq!(crossing_point(&r[2..]), Some(30.0));
    }

    #[test]
    fn crossing_needs_confident_lower_end() {
        // p̂ = 0.5 on 10 trials has ci_low ≈ 0.24
        assert_eq!(crossing_point(&[rec(5, 5, 10)]), None);
    }

    #[test]
    fn monotonicity_slack() {
        assert!(monotone_within(
            &[rec(1, 500, 1000), rec(2, 480, 1000)],
            2.0
        ));
        assert!(!monotone_within(
            &[rec(1, 500, 1000), rec(2, 400, 1000)],
            2.0
        ));
    }

    #[test]
    fn exact_plan_rejects_3x3() {
        let dims = ProductDims::bipartite(3, 3).unwrap();
        assert!(matches!(
            ScanPlan::new(dims.clone(), vec![10], 5, Criterion::Exact, 0),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(ScanPlan::new(dims, vec![10], 5, Criterion::Ppt, 0).is_ok());
    }

    #[test]
    fn small_scan_is_reproducible() {
        let plan = ScanPlan::new(
            ProductDims::bipartite(2, 2).unwrap(),
            vec![8, 1],
            200,
            Criterion::Exact,
            5,
        )
        .unwrap();
        let a = threshold_scan(&plan).unwrap();
        let b = threshold_scan(&plan).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records[0].s, 1);
        assert_eq!(a.records[0].successes, 0);
        assert!(a.records[1].p_hat > 0.5);
        assert!(a.bound_entanglement_window.is_none());
    }

    #[test]
    fn gauge_body_names_round_trip() {
        for b in [GaugeBody::D0, GaugeBody::Ppt0, GaugeBody::Hs, GaugeBody::S0] {
            assert_eq!(b.to_string().parse::<GaugeBody>().unwrap(), b);
        }
        assert!("nope".parse::<GaugeBody>().is_err());
    }

    #[test]
    fn s0_body_needs_small_dims() {
        let dims = ProductDims::bipartite(3, 3).unwrap();
        assert!(induced_gauges(&dims, 10, GaugeBody::S0, 2, SeededStream::new(0, 0)).is_err());
    }

    #[test]
    fn identical_dims_give_identical_indicators() {
        let r = monotonicity_experiment(2, 2, 6, 100, SeededStream::new(8, 0)).unwrap();
        assert_eq!(r.projection.p_larger, r.projection.p_smaller);
        assert_eq!(r.projection.violations, 0);
    }

    #[test]
    fn spectral_rows_have_expected_shape() {
        let rows = spectral_experiment(
            EnsembleKind::Induced,
            8,
            Some(32),
            5,
            SeededStream::new(1, 2),
        )
        .unwrap();
        assert_eq!(rows.len(), 5);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.trial, i);
            assert_eq!(r.s, Some(32));
            assert!(r.alpha * r.beta >= 1.0 - 1e-9);
            assert!(r.lambda_max >= r.lambda_min);
        }
        let rows =
            spectral_experiment(EnsembleKind::Gue0, 8, None, 2, SeededStream::new(1, 3)).unwrap();
        assert_eq!(rows[0].s, None);
        assert!(spectral_experiment(
            EnsembleKind::Ginibre,
            8,
            Some(3),
            2,
            SeededStream::new(1, 3)
        )
        .is_err());
    }
}

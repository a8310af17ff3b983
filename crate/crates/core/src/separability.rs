//! PPT and exact separability tests, gauges of the centred bodies
//! D₀ ⊃ PPT₀ ⊃ S₀, and the product-state support function.
//!
//! Exact separability is only decided in 2×2 and 2×3, where it coincides
//! with PPT. Everywhere else callers have to ask for PPT explicitly.

use num_complex::Complex64;
use serde::Serialize;

use crate::ensembles::{sample_gue0, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, kron_vectors, min_eigenvalue, partial_transpose, top_eigenpair,
    ComplexMatrix, HermitianOperator, ProductDims, TracelessHermitian,
};
use crate::rng::SeededStream;
use crate::stats::{map_trials, EstimateWithCI};

/// λ_min threshold below which an operator counts as not positive. Absorbs
/// eigensolver residuals; boundary states are classified positive.
pub const PSD_TOLERANCE: f64 = -1e-11;

/// Default relative bisection tolerance for [`gauge_s0`].
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeResult {
    /// Upper end of the final bracket; A/value is certified to lie in the body.
    pub value: f64,
    pub bracket_width: f64,
    pub membership_evals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportResult {
    pub value: f64,
    /// One unit vector per tensor factor.
    pub maximizer: Vec<Vec<Complex64>>,
    pub restarts_used: usize,
}

/// Alternating-maximization settings for [`support_s0`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternatingOptions {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub tol: f64,
}

impl Default for AlternatingOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_sweeps: 500,
            tol: 1e-12,
        }
    }
}

fn require_bipartite(dims: &ProductDims) -> Result<()> {
    if !dims.is_bipartite() {
        return Err(Error::input(format!(
            "PPT needs a bipartite split, got factors {:?}",
            dims.factors()
        )));
    }
    Ok(())
}

fn require_exact_dims(dims: &ProductDims) -> Result<()> {
    match dims.factors() {
        [2, 2] | [2, 3] | [3, 2] => Ok(()),
        f => Err(Error::unsupported(
            f,
            "exact separability is only available for 2x2 and 2x3 systems; use the PPT criterion",
        )),
    }
}

fn min_pt_eigenvalue_op(op: &HermitianOperator, dims: &ProductDims) -> Result<f64> {
    require_bipartite(dims)?;
    min_eigenvalue(&partial_transpose(op, dims, 1)?)
}

/// λ_min of the partial transpose (second factor transposed).
pub fn min_pt_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    min_pt_eigenvalue_op(rho.operator(), rho.dims())
}

pub fn is_ppt(rho: &DensityMatrix) -> Result<bool> {
    Ok(min_pt_eigenvalue(rho)? >= PSD_TOLERANCE)
}

/// Exact separability in 2×2 and 2×3, where PPT is necessary and sufficient.
pub fn is_separable_exact(rho: &DensityMatrix) -> Result<bool> {
    require_exact_dims(rho.dims())?;
    is_ppt(rho)
}

/// Membership of Id/n + A/t in S for the exact dimensions: both the operator
/// and its partial transpose must be positive.
fn centered_separable(a: &TracelessHermitian, t: f64, dims: &ProductDims) -> Result<bool> {
    let n = dims.total() as f64;
    let op = a.operator().scale(1.0 / t).shift(1.0 / n);
    Ok(min_eigenvalue(&op)? >= PSD_TOLERANCE && min_pt_eigenvalue_op(&op, dims)? >= PSD_TOLERANCE)
}

/// ‖A‖_{D₀} = n·max(0, −λ_min(A)).
pub fn gauge_d0(a: &TracelessHermitian) -> Result<f64> {
    if a.dim() == 0 {
        return Ok(0.0);
    }
    let n = a.dim() as f64;
    Ok(n * (-min_eigenvalue(a.operator())?).max(0.0))
}

/// ‖A‖_{PPT₀} = max(‖A‖_{D₀}, ‖A^Γ‖_{D₀}).
pub fn gauge_ppt0(a: &TracelessHermitian, dims: &ProductDims) -> Result<f64> {
    require_bipartite(dims)?;
    let pt = TracelessHermitian::project(partial_transpose(a.operator(), dims, 1)?);
    Ok(gauge_d0(a)?.max(gauge_d0(&pt)?))
}

/// ‖A‖_{S₀} by bisection on t with the exact membership test, starting from
/// the bracket [‖A‖_{D₀}, √(n(n−1))·‖A‖_HS] (S ⊂ D, and S₀ contains the HS
/// ball of radius 1/√(n(n−1))). Stops once the bracket is narrower than the
/// absolute tolerance `tol`.
pub fn gauge_s0(a: &TracelessHermitian, dims: &ProductDims, tol: f64) -> Result<GaugeResult> {
    require_exact_dims(dims)?;
    if a.dim() != dims.total() {
        return Err(Error::input("operator dimension does not match dims"));
    }
    if !(tol > 0.0) {
        return Err(Error::input("tolerance must be positive"));
    }
    if a.is_zero() || a.hs_norm() == 0.0 {
        return Ok(GaugeResult {
            value: 0.0,
            bracket_width: 0.0,
            membership_evals: 0,
        });
    }
    let n = dims.total() as f64;
    let mut lo = gauge_d0(a)?;
    let mut hi = (n * (n - 1.0)).sqrt() * a.hs_norm();
    let mut evals = 0;

    // the inradius bracket can sit exactly on the boundary; nudge outward
    loop {
        evals += 1;
        if centered_separable(a, hi, dims)? {
            break;
        }
        lo = lo.max(hi);
        hi *= 1.0 + 1e-9;
        if evals > 64 {
            hi *= 2.0;
        }
    }
    if lo > 0.0 && lo < hi {
        evals += 1;
        if centered_separable(a, lo, dims)? {
            return Ok(GaugeResult {
                value: lo,
                bracket_width: 0.0,
                membership_evals: evals,
            });
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        evals += 1;
        if centered_separable(a, mid, dims)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(GaugeResult {
        value: hi,
        bracket_width: hi - lo,
        membership_evals: evals,
    })
}

/// [`gauge_s0`] with tolerance `rel` times the initial upper bracket.
pub fn gauge_s0_relative(
    a: &TracelessHermitian,
    dims: &ProductDims,
    rel: f64,
) -> Result<GaugeResult> {
    let n = dims.total() as f64;
    let scale = (n * (n - 1.0)).sqrt() * a.hs_norm();
    if scale == 0.0 {
        return gauge_s0(a, dims, 1.0);
    }
    gauge_s0(a, dims, rel * scale)
}

/// ‖A‖_{S_sym} = max(‖A‖_{S₀}, ‖−A‖_{S₀}).
pub fn gauge_ssym(a: &TracelessHermitian, dims: &ProductDims, tol: f64) -> Result<GaugeResult> {
    let plus = gauge_s0(a, dims, tol)?;
    let minus = gauge_s0(&a.neg(), dims, tol)?;
    Ok(GaugeResult {
        value: plus.value.max(minus.value),
        bracket_width: plus.bracket_width.max(minus.bracket_width),
        membership_evals: plus.membership_evals + minus.membership_evals,
    })
}

/// Per-factor weights ∏_{f≠j} ψ_f[digit_f(i)] and the digit of factor j for
/// every flat index i.
fn factor_contraction(
    a: &HermitianOperator,
    dims: &ProductDims,
    factors: &[Vec<Complex64>],
    j: usize,
) -> HermitianOperator {
    let n = dims.total();
    let dj = dims.factors()[j];
    let mut weight = vec![Complex64::new(1.0, 0.0); n];
    let mut digit = vec![0usize; n];
    for (i, (w, dg)) in weight.iter_mut().zip(digit.iter_mut()).enumerate() {
        let ds = dims.digits(i);
        for (f, &d) in ds.iter().enumerate() {
            if f == j {
                *dg = d;
            } else {
                *w *= factors[f][d];
            }
        }
    }
    let m = a.matrix();
    let mut out = ComplexMatrix::zeros(dj, dj);
    for r in 0..n {
        let wr = weight[r].conj();
        if wr == Complex64::new(0.0, 0.0) {
            continue;
        }
        for c in 0..n {
            out[(digit[r], digit[c])] += wr * m[(r, c)] * weight[c];
        }
    }
    HermitianOperator::new(out).expect("contraction of a finite operator is finite")
}

/// One alternating-maximization run from `start`. Returns the final value,
/// the maximizing factors and the objective after every sweep.
pub fn alternating_maximization(
    a: &HermitianOperator,
    dims: &ProductDims,
    start: Vec<Vec<Complex64>>,
    max_sweeps: usize,
    tol: f64,
) -> Result<(f64, Vec<Vec<Complex64>>, Vec<f64>)> {
    let k = dims.num_factors();
    if start.len() != k || start.iter().zip(dims.factors()).any(|(v, &d)| v.len() != d) {
        return Err(Error::input("starting product state does not match dims"));
    }
    let mut factors = start;
    let mut value = a.expectation(&kron_vectors(&factors));
    let mut history = Vec::new();
    for _ in 0..max_sweeps {
        let before = value;
        for j in 0..k {
            let contracted = factor_contraction(a, dims, &factors, j);
            let (lambda, v) = top_eigenpair(&contracted)?;
            factors[j] = v;
            value = lambda;
        }
        history.push(value);
        if value - before < tol {
            break;
        }
    }
    Ok((value, factors, history))
}

/// Lower bound on h_{S₀}(A) = max over product unit vectors ψ of ⟨ψ|A|ψ⟩,
/// from the best of `opts.restarts` alternating-maximization runs started at
/// uniformly random product states.
pub fn support_s0(
    a: &TracelessHermitian,
    dims: &ProductDims,
    opts: AlternatingOptions,
    stream: SeededStream,
) -> Result<SupportResult> {
    if dims.num_factors() < 2 {
        return Err(Error::input(
            "support over product states needs at least two factors",
        ));
    }
    if a.dim() != dims.total() {
        return Err(Error::input("operator dimension does not match dims"));
    }
    let mut best: Option<(f64, Vec<Vec<Complex64>>)> = None;
    let restarts = opts.restarts.max(1);
    for r in 0..restarts {
        let mut g = stream.child(r as u64).gaussian();
        let start = dims
            .factors()
            .iter()
            .map(|&d| g.unit_complex_vector(d))
            .collect();
        let (value, factors, _) =
            alternating_maximization(a.operator(), dims, start, opts.max_sweeps, opts.tol)?;
        if best.as_ref().map_or(true, |(b, _)| value > *b) {
            best = Some((value, factors));
        }
    }
    let (value, maximizer) = best.expect("at least one restart");
    Ok(SupportResult {
        value,
        maximizer,
        restarts_used: restarts,
    })
}

/// Gauges of one GUE⁰ draw at n = 4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GueGaugeSample {
    pub s0: f64,
    pub ppt0: f64,
    pub d0: f64,
    pub hs: f64,
}

fn require_d2(d: usize) -> Result<()> {
    if d != 2 {
        return Err(Error::unsupported(
            &[d, d],
            "the exact S₀ gauge is only available at d = 2",
        ));
    }
    Ok(())
}

/// Gauges of `trials` GUE⁰ draws on C²⊗C².
pub fn gue_gauge_samples(
    d: usize,
    trials: usize,
    stream: SeededStream,
) -> Result<Vec<GueGaugeSample>> {
    require_d2(d)?;
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    let dims = ProductDims::bipartite(2, 2)?;
    map_trials(trials, stream, |_, s| -> Result<GueGaugeSample> {
        let g = sample_gue0(4, s)?;
        Ok(GueGaugeSample {
            s0: gauge_s0_relative(&g, &dims, DEFAULT_RELATIVE_TOL)?.value,
            ppt0: gauge_ppt0(&g, &dims)?,
            d0: gauge_d0(&g)?,
            hs: g.hs_norm(),
        })
    })
    .into_iter()
    .collect()
}

/// Monte-Carlo estimate of E‖G‖_{S₀} for G ~ GUE⁰ on C²⊗C².
pub fn mean_gauge_gue(d: usize, trials: usize, stream: SeededStream) -> Result<EstimateWithCI> {
    let samples = gue_gauge_samples(d, trials, stream)?;
    let values: Vec<f64> = samples.iter().map(|s| s.s0).collect();
    Ok(EstimateWithCI::from_samples(&values, stream.seed()))
}

/// Spectrum of the partial transpose, exposed for reporting.
pub fn pt_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    require_bipartite(rho.dims())?;
    Ok(hermitian_eigenvalues(&partial_transpose(rho.operator(), rho.dims(), 1)?)?.into_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn dims22() -> ProductDims {
        ProductDims::bipartite(2, 2).unwrap()
    }

    fn phi_plus() -> HermitianOperator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        HermitianOperator::projector(&[c(s), c(0.), c(0.), c(s)])
    }

    fn werner(p: f64) -> DensityMatrix {
        let op = phi_plus()
            .scale(p)
            .add(&HermitianOperator::identity(4).scale((1.0 - p) / 4.0))
            .unwrap();
        DensityMatrix::new(dims22(), op).unwrap()
    }

    fn phi_plus_centered() -> TracelessHermitian {
        TracelessHermitian::project(phi_plus())
    }

    fn sigma_z_z() -> TracelessHermitian {
        TracelessHermitian::new(HermitianOperator::from_real_diagonal(&[
            1.0, -1.0, -1.0, 1.0,
        ]))
        .unwrap()
    }

    #[test]
    fn werner_pt_minimum() {
        // PT spectrum of a Werner state: (1+p)/4 three times, (1−3p)/4 once
        assert!((min_pt_eigenvalue(&werner(0.5)).unwrap() + 0.125).abs() < 1e-14);
        assert!(min_pt_eigenvalue(&werner(1.0 / 3.0)).unwrap().abs() < 1e-14);
        let spec = pt_spectrum(&werner(0.5)).unwrap();
        for (a, b) in spec.iter().zip([0.375, 0.375, 0.375, -0.125]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn product_states_are_ppt() {
        let v = kron_vectors(&[vec![c(0.6), Complex64::new(0.0, 0.8)], vec![c(1.0), c(0.0)]]);
        let rho = DensityMatrix::pure(dims22(), &v).unwrap();
        assert!(min_pt_eigenvalue(&rho).unwrap() >= -1e-15);
        assert!(is_separable_exact(&rho).unwrap());
    }

    #[test]
    fn exact_separability_examples() {
        assert!(is_separable_exact(&DensityMatrix::maximally_mixed(dims22())).unwrap());
        assert!(!is_separable_exact(&werner(0.5)).unwrap());
        assert!(!is_separable_exact(&werner(1.0)).unwrap());
        assert!(is_separable_exact(&werner(1.0 / 3.0)).unwrap());
    }

    #[test]
    fn exact_separability_refuses_large_dims() {
        let rho = DensityMatrix::maximally_mixed(ProductDims::bipartite(3, 3).unwrap());
        assert!(matches!(
            is_separable_exact(&rho),
            Err(Error::UnsupportedDimension { .. })
        ));
        let rho = DensityMatrix::maximally_mixed(ProductDims::bipartite(3, 2).unwrap());
        assert!(is_separable_exact(&rho).unwrap());
        let tri = DensityMatrix::maximally_mixed(ProductDims::new(&[2, 2, 2]).unwrap());
        assert!(min_pt_eigenvalue(&tri).is_err());
    }

    #[test]
    fn d0_gauge_examples() {
        assert_eq!(gauge_d0(&TracelessHermitian::zeros(4)).unwrap(), 0.0);
        assert!((gauge_d0(&sigma_z_z()).unwrap() - 4.0).abs() < 1e-14);
        let a = phi_plus_centered();
        for c in [0.5, 2.0, 10.0] {
            let lhs = gauge_d0(&a.scale(c)).unwrap();
            assert!((lhs - c * gauge_d0(&a).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn ppt_gauge_of_centered_bell_state() {
        // A has spectrum (3/4, −1/4 ×3) → 1; A^Γ = swap/2 − Id/4 has (1/4 ×3, −3/4) → 3
        let a = phi_plus_centered();
        assert!((gauge_d0(&a).unwrap() - 1.0).abs() < 1e-14);
        assert!((gauge_ppt0(&a, &dims22()).unwrap() - 3.0).abs() < 1e-14);
        // σ_z⊗σ_z is invariant under partial transpose
        let z = sigma_z_z();
        assert_eq!(gauge_ppt0(&z, &dims22()).unwrap(), gauge_d0(&z).unwrap());
    }

    #[test]
    fn s0_gauge_of_centered_bell_state() {
        let r = gauge_s0(&phi_plus_centered(), &dims22(), 1e-10).unwrap();
        assert!((r.value - 3.0).abs() < 1e-9, "{r:?}");
        assert!(r.bracket_width <= 1e-10);
        let zero = gauge_s0(&TracelessHermitian::zeros(4), &dims22(), 1e-8).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn s0_gauge_requires_exact_dims() {
        let a = TracelessHermitian::zeros(9);
        assert!(matches!(
            gauge_s0(&a, &ProductDims::bipartite(3, 3).unwrap(), 1e-8),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn ssym_of_centered_bell_state() {
        let a = phi_plus_centered();
        let r = gauge_ssym(&a, &dims22(), 1e-10).unwrap();
        let minus = gauge_s0(&a.neg(), &dims22(), 1e-10).unwrap();
        assert!((minus.value - 3.0).abs() < 1e-9);
        assert!((r.value - 3.0).abs() < 1e-9);
        let hs = a.hs_norm();
        assert!(2.0 * hs <= r.value + 1e-9 && r.value <= 4.0 * hs + 1e-9);
    }

    #[test]
    fn support_examples() {
        let opts = AlternatingOptions::default();
        let r = support_s0(&sigma_z_z(), &dims22(), opts, SeededStream::new(1, 0)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        let r = support_s0(
            &phi_plus_centered(),
            &dims22(),
            opts,
            SeededStream::new(1, 1),
        )
        .unwrap();
        assert!((r.value - 0.25).abs() < 1e-10);
        let psi = kron_vectors(&r.maximizer);
        assert!(r.value >= phi_plus_centered().operator().expectation(&psi) - 1e-12);
    }

    #[test]
    fn bell_support_against_bloch_grid() {
        // product vectors (cos a, e^{ib} sin a) ⊗ (cos c, e^{id} sin c)
        let a = phi_plus_centered();
        let steps = 24;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            for j in 0..steps {
                for k in 0..=steps {
                    for l in 0..steps {
                        let th1 = std::f64::consts::FRAC_PI_2 * i as f64 / steps as f64;
                        let ph1 = 2.0 * std::f64::consts::PI * j as f64 / steps as f64;
                        let th2 = std::f64::consts::FRAC_PI_2 * k as f64 / steps as f64;
                        let ph2 = 2.0 * std::f64::consts::PI * l as f64 / steps as f64;
                        let u = vec![c(th1.cos()), Complex64::from_polar(th1.sin(), ph1)];
                        let v = vec![c(th2.cos()), Complex64::from_polar(th2.sin(), ph2)];
                        best = best.max(a.operator().expectation(&kron_vectors(&[u, v])));
                    }
                }
            }
        }
        assert!((best - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sweeps_never_decrease_objective() {
        let dims = ProductDims::new(&[2, 3, 2]).unwrap();
        for t in 0..5 {
            let a = sample_gue0(12, SeededStream::new(77, t)).unwrap();
            let mut g = SeededStream::new(78, t).gaussian();
            let start = dims
                .factors()
                .iter()
                .map(|&d| g.unit_complex_vector(d))
                .collect();
            let (_, _, hist) =
                alternating_maximization(a.operator(), &dims, start, 200, 0.0).unwrap();
            for w in hist.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "{hist:?}");
            }
        }
    }

    #[test]
    fn gue_gauges_rejects_other_d() {
        assert!(matches!(
            mean_gauge_gue(3, 10, SeededStream::new(0, 0)),
            Err(Error::UnsupportedDimension { .. })
        ));
    }
}

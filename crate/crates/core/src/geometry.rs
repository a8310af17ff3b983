//! Exact and Monte-Carlo convex geometry of the state space.
//!
//! Volumes and normalizations are evaluated in log space through `lgamma`;
//! Z_{n,s} itself underflows long before n = 64. Mean widths are estimated
//! from support oracles on R^m, where matrix bodies are identified with
//! R^{n²−1} through an orthonormal traceless basis (see
//! [`crate::linalg::traceless_from_coordinates`]). Under that identification
//! a standard Gaussian direction is a GUE⁰ matrix.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::ensembles::sample_gue0;
use crate::error::{Error, Result};
use crate::linalg::{max_eigenvalue, traceless_from_coordinates, ProductDims, TracelessHermitian};
use crate::rng::{Gaussian, SeededStream};
use crate::separability::{
    gauge_d0, gauge_ppt0, gauge_ssym, gue_gauge_samples, support_s0, AlternatingOptions,
    DEFAULT_RELATIVE_TOL,
};
use crate::stats::{map_trials, mean_and_std, EstimateWithCI};

fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// log γ_m, where γ_m = E|G| = √2·Γ((m+1)/2)/Γ(m/2) for G standard
/// Gaussian in R^m. Returns −∞ for m = 0.
pub fn log_gamma_m(m: usize) -> f64 {
    if m == 0 {
        return f64::NEG_INFINITY;
    }
    let m = m as f64;
    0.5 * 2f64.ln() + lgamma((m + 1.0) / 2.0) - lgamma(m / 2.0)
}

pub fn gamma_m(m: usize) -> f64 {
    log_gamma_m(m).exp()
}

/// log Z_{n,s}, the normalization of the induced density det(ρ)^{s−n}.
///
/// log Z = ½ log n + n(n−1)/2 · log 2π − log Γ(sn) + Σ_{j<n} log Γ(s−j),
/// valid for real s ≥ n.
pub fn log_z(n: usize, s: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    if !s.is_finite() || s < n as f64 {
        return Err(Error::domain(format!(
            "log Z needs s >= n, got n = {n}, s = {s}"
        )));
    }
    let nf = n as f64;
    let mut acc = 0.5 * nf.ln() + nf * (nf - 1.0) / 2.0 * (2.0 * PI).ln() - lgamma(s * nf);
    for j in 0..n {
        acc += lgamma(s - j as f64);
    }
    Ok(acc)
}

/// log of the factor (2π)^{n(n−1)/2} / ∏_{j=1}^n Γ(j) separating the
/// Lebesgue normalization on matrices from the one on the eigenvalue simplex
/// with Haar measure on the flag manifold.
pub fn log_flag_conversion(n: usize) -> f64 {
    let nf = n as f64;
    let mut acc = nf * (nf - 1.0) / 2.0 * (2.0 * PI).ln();
    for j in 1..=n {
        acc -= lgamma(j as f64);
    }
    acc
}

/// log vol B₂^m = (m/2) log π − log Γ(m/2 + 1).
pub fn log_unit_ball_volume(m: usize) -> f64 {
    let m = m as f64;
    0.5 * m * PI.ln() - lgamma(0.5 * m + 1.0)
}

/// Volume radius of D(C^n) in the Hilbert–Schmidt metric.
pub fn vrad_states(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("vrad needs n >= 2"));
    }
    let m = n * n - 1;
    Ok(((log_z(n, n as f64)? - log_unit_ball_volume(m)) / m as f64).exp())
}

/// (n^{−n(s−n)} Z_{n,n}/Z_{n,s})^{1/(n²−1)} / √(s/n).
pub fn comparison_ratio(n: usize, s: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("comparison ratio needs n >= 2"));
    }
    let nf = n as f64;
    let log_inner = -nf * (s - nf) * nf.ln() + log_z(n, nf)? - log_z(n, s)?;
    Ok((log_inner / (nf * nf - 1.0) - 0.5 * (s / nf).ln()).exp())
}

/// Right-hand sides of the multipartite volume-ratio bounds for k parties of
/// local dimension d, without universal constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SepVolumeBounds {
    pub k: usize,
    pub d: usize,
    pub bound_i: f64,
    pub bound_ii: f64,
    pub beta_d: f64,
}

/// β_d = log_d(1 + 1/d) − d^{−2} log_d(d + 1).
pub fn beta_d(d: usize) -> f64 {
    let df = d as f64;
    let ln_d = df.ln();
    (1.0 + 1.0 / df).ln() / ln_d - (df + 1.0).ln() / (ln_d * df * df)
}

pub fn sep_volume_bound(k: usize, d: usize) -> Result<SepVolumeBounds> {
    if k < 2 || d < 2 {
        return Err(Error::domain("need k >= 2 and d >= 2"));
    }
    let (kf, df) = (k as f64, d as f64);
    let ln_n = kf * df.ln();
    let beta = beta_d(d);
    let kln = kf * kf.ln();
    Ok(SepVolumeBounds {
        k,
        d,
        bound_i: kln.sqrt() * ((-0.5 + 0.5 / kf) * ln_n).exp(),
        bound_ii: (df * kln * (-(1.0 + beta) * ln_n).exp()).sqrt(),
        beta_d: beta,
    })
}

type Evaluator<'a> = dyn Fn(&[f64], SeededStream) -> f64 + Sync + Send + 'a;

/// Support function h_K on R^m. The stream argument lets randomized oracles
/// (restarted local searches) stay reproducible per direction.
pub struct SupportOracle<'a> {
    dim: usize,
    eval: Box<Evaluator<'a>>,
}

impl<'a> SupportOracle<'a> {
    pub fn new<F>(dim: usize, eval: F) -> Self
    where
        F: Fn(&[f64], SeededStream) -> f64 + Sync + Send + 'a,
    {
        Self {
            dim,
            eval: Box::new(eval),
        }
    }

    /// Oracle on the traceless Hermitian n×n matrices.
    pub fn on_traceless<F>(n: usize, eval: F) -> Self
    where
        F: Fn(&TracelessHermitian, SeededStream) -> f64 + Sync + Send + 'a,
    {
        Self::new(n * n - 1, move |x, s| {
            match traceless_from_coordinates(n, x) {
                Ok(a) => eval(&a, s),
                Err(_) => f64::NAN,
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64], stream: SeededStream) -> f64 {
        (self.eval)(x, stream)
    }
}

impl fmt::Debug for SupportOracle<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupportOracle")
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidthEstimate {
    /// Gaussian mean width w_G when `gaussian_norm_used`, else w.
    pub value: f64,
    pub stderr: f64,
    /// Trials that returned a finite support value.
    pub trials: usize,
    pub failures: usize,
    pub gaussian_norm_used: bool,
    /// The oracle only lower-bounds h_K, so `value` is a lower bound.
    pub lower_bound: bool,
    pub gamma_m: f64,
}

impl WidthEstimate {
    /// Spherical mean width w = w_G/γ_m.
    pub fn mean_width(&self) -> (f64, f64) {
        if self.gaussian_norm_used {
            (self.value / self.gamma_m, self.stderr / self.gamma_m)
        } else {
            (self.value, self.stderr)
        }
    }
}

fn gaussian_direction(g: &mut Gaussian, m: usize) -> Vec<f64> {
    (0..m).map(|_| g.normal()).collect()
}

/// w_G(K) = E h_K(G) over standard Gaussian G in R^m. Non-finite oracle
/// values are dropped and counted as failures.
pub fn gaussian_mean_width_mc(
    oracle: &SupportOracle<'_>,
    trials: usize,
    stream: SeededStream,
) -> Result<WidthEstimate> {
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    let m = oracle.dim();
    let values = map_trials(trials, stream, |_, s| {
        let mut g = s.gaussian();
        let x = gaussian_direction(&mut g, m);
        oracle.eval(&x, s.child(0))
    });
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return Err(Error::domain("support oracle failed on every trial"));
    }
    let (mean, sd) = mean_and_std(&finite);
    Ok(WidthEstimate {
        value: mean,
        stderr: sd / (finite.len() as f64).sqrt(),
        trials: finite.len(),
        failures: trials - finite.len(),
        gaussian_norm_used: true,
        lower_bound: false,
        gamma_m: gamma_m(m),
    })
}

/// w_G(S₀) from the product-state support oracle. Certified lower bound.
pub fn width_s0(dims: &ProductDims, trials: usize, stream: SeededStream) -> Result<WidthEstimate> {
    width_s0_with(dims, trials, stream, AlternatingOptions::default())
}

pub fn width_s0_with(
    dims: &ProductDims,
    trials: usize,
    stream: SeededStream,
    opts: AlternatingOptions,
) -> Result<WidthEstimate> {
    if dims.num_factors() < 2 {
        return Err(Error::input("width of S₀ needs at least two factors"));
    }
    let oracle = SupportOracle::on_traceless(dims.total(), |a, s| {
        support_s0(a, dims, opts, s).map_or(f64::NAN, |r| r.value)
    });
    let mut est = gaussian_mean_width_mc(&oracle, trials, stream)?;
    est.lower_bound = true;
    Ok(est)
}

/// w(D₀) = E λ_max(G)/γ_m, exact support oracle.
pub fn width_d0(n: usize, trials: usize, stream: SeededStream) -> Result<WidthEstimate> {
    if n < 2 {
        return Err(Error::domain("n must be at least 2"));
    }
    let oracle =
        SupportOracle::on_traceless(n, |a, _| max_eigenvalue(a.operator()).unwrap_or(f64::NAN));
    gaussian_mean_width_mc(&oracle, trials, stream)
}

/// Certified quantities for w_G(S_sym)·w_G(S_sym°) ≥ γ_m².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityCheck {
    /// Lower bound on w_G(S_sym).
    pub width_body: EstimateWithCI,
    /// Upper-end estimate of w_G(S_sym°) = E ‖G‖_{S_sym}.
    pub width_polar: EstimateWithCI,
    pub product: f64,
    pub gamma_m_sq: f64,
    /// Relative standard error of the product (first order).
    pub relative_se: f64,
}

impl DualityCheck {
    pub fn holds(&self) -> bool {
        self.product >= self.gamma_m_sq * (1.0 - 3.0 * self.relative_se)
    }
}

/// Estimates both sides of the duality inequality on C²⊗C².
///
/// The polar side is E‖G‖_{S_sym}, using the certified upper end of the
/// bisection bracket. The body side lower-bounds h_{S_sym}(G) by ⟨G, B⟩ over
/// two certified members B of S_sym: G/‖G‖_{S_sym} and the best centred
/// product state rescaled into S_sym.
pub fn width_duality_check(
    dims: &ProductDims,
    trials: usize,
    stream: SeededStream,
) -> Result<DualityCheck> {
    if dims.factors() != [2, 2] {
        return Err(Error::unsupported(
            dims.factors(),
            "duality check is only available at 2x2",
        ));
    }
    if trials < 2 {
        return Err(Error::input("duality check needs at least two trials"));
    }
    let n = dims.total();
    let opts = AlternatingOptions {
        restarts: 5,
        ..AlternatingOptions::default()
    };
    let pairs = map_trials(trials, stream, |_, s| -> Result<(f64, f64)> {
        let g = sample_gue0(n, s.child(0))?;
        let hs2 = g.hs_norm().powi(2);
        let tol = DEFAULT_RELATIVE_TOL * g.hs_norm();
        let polar = gauge_ssym(&g, dims, tol)?.value;
        let mut body = if polar > 0.0 { hs2 / polar } else { 0.0 };
        let sup = support_s0(&g, dims, opts, s.child(1))?;
        let psi = crate::linalg::kron_vectors(&sup.maximizer);
        let p = TracelessHermitian::project(crate::linalg::HermitianOperator::projector(&psi));
        let p_gauge = gauge_ssym(&p, dims, DEFAULT_RELATIVE_TOL)?.value;
        if p_gauge > 0.0 {
            body = body.max(g.operator().hs_inner(p.operator()).re / p_gauge);
        }
        Ok((body, polar))
    });
    let pairs: Vec<(f64, f64)> = pairs.into_iter().collect::<Result<_>>()?;
    let body: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let polar: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let seed = stream.seed();
    let wb = EstimateWithCI::from_samples(&body, seed);
    let wp = EstimateWithCI::from_samples(&polar, seed);
    let gm = gamma_m(n * n - 1);
    Ok(DualityCheck {
        width_body: wb,
        width_polar: wp,
        product: wb.mean * wp.mean,
        gamma_m_sq: gm * gm,
        relative_se: (wb.stderr / wb.mean).hypot(wp.stderr / wp.mean),
    })
}

/// A convex body in R^m that can be sampled uniformly.
pub trait ConvexBody {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
    fn sample_uniform(&self, g: &mut Gaussian) -> Vec<f64>;
}

/// Uniform point of the standard simplex {w ≥ 0, Σw = 1} in R^{k}.
fn dirichlet_ones(g: &mut Gaussian, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| g.exponential()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

/// Solves M x = b for a small dense system by Gaussian elimination with
/// partial pivoting. Returns None if M is numerically singular.
fn solve_small(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    Some(x)
}

fn determinant_small(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}

/// Simplex given by m + 1 vertices in R^m.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<Vec<f64>>,
    /// Columns v_i − v_0 stored row-wise, i.e. edges[r][c] = (v_{c+1} − v_0)_r.
    edges: Vec<Vec<f64>>,
}

impl Simplex {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let m = vertices
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::input("simplex needs vertices"))?;
        if m == 0 || vertices.iter().any(|v| v.len() != m) {
            return Err(Error::input(
                "simplex in R^m needs m + 1 vertices of length m",
            ));
        }
        let edges = (0..m)
            .map(|r| {
                (0..m)
                    .map(|c| vertices[c + 1][r] - vertices[0][r])
                    .collect()
            })
            .collect();
        Ok(Self { vertices, edges })
    }

    /// Random Gaussian simplex translated so its centroid is the origin.
    /// Degenerate draws (volume below 1e-12 of the bounding box) are redrawn.
    pub fn random_centered(m: usize, g: &mut Gaussian) -> Result<Self> {
        if m == 0 {
            return Err(Error::input("dimension must be positive"));
        }
        loop {
            let mut verts: Vec<Vec<f64>> = (0..=m).map(|_| gaussian_direction(g, m)).collect();
            let centroid: Vec<f64> = (0..m)
                .map(|i| verts.iter().map(|v| v[i]).sum::<f64>() / (m + 1) as f64)
                .collect();
            for v in &mut verts {
                for (x, c) in v.iter_mut().zip(&centroid) {
                    *x -= c;
                }
            }
            let s = Self::new(verts)?;
            if s.volume() >= 1e-12 * s.bounding_box_volume() {
                return Ok(s);
            }
        }
    }

    /// Regular simplex centred at the origin, built from the standard basis
    /// of R^{m+1} and expressed in an orthonormal basis of the hyperplane
    /// Σx = 0 (Helmert rows).
    pub fn regular(m: usize) -> Result<Self> {
        let verts = (0..=m)
            .map(|i| {
                (1..=m)
                    .map(|k| {
                        let norm = ((k * (k + 1)) as f64).sqrt();
                        if i < k {
                            1.0 / norm
                        } else if i == k {
                            -(k as f64) / norm
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(verts)
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn volume(&self) -> f64 {
        let m = self.edges.len();
        let fact: f64 = (1..=m).map(|k| k as f64).product();
        determinant_small(self.edges.clone()).abs() / fact
    }

    pub fn bounding_box_volume(&self) -> f64 {
        let m = self.edges.len();
        (0..m)
            .map(|i| {
                let (lo, hi) = self
                    .vertices
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                        (lo.min(v[i]), hi.max(v[i]))
                    });
                hi - lo
            })
            .product()
    }

    fn barycentric(&self, x: &[f64]) -> Option<Vec<f64>> {
        let rhs: Vec<f64> = x
            .iter()
            .zip(&self.vertices[0])
            .map(|(a, b)| a - b)
            .collect();
        let tail = solve_small(self.edges.clone(), rhs)?;
        let first = 1.0 - tail.iter().sum::<f64>();
        Some(std::iter::once(first).chain(tail).collect())
    }
}

impl ConvexBody for Simplex {
    fn dim(&self) -> usize {
        self.edges.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.barycentric(x)
            .is_some_and(|w| w.iter().all(|&c| c >= -1e-12))
    }

    fn sample_uniform(&self, g: &mut Gaussian) -> Vec<f64> {
        let w = dirichlet_ones(g, self.vertices.len());
        let m = self.dim();
        (0..m)
            .map(|i| w.iter().zip(&self.vertices).map(|(wk, v)| wk * v[i]).sum())
            .collect()
    }
}

/// The unit ℓ₁ ball in R^m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossPolytope {
    pub m: usize,
}

impl ConvexBody for CrossPolytope {
    fn dim(&self) -> usize {
        self.m
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.iter().map(|v| v.abs()).sum::<f64>() <= 1.0 + 1e-12
    }

    fn sample_uniform(&self, g: &mut Gaussian) -> Vec<f64> {
        let w = dirichlet_ones(g, self.m + 1);
        w[..self.m]
            .iter()
            .map(|&x| if g.uniform() < 0.5 { -x } else { x })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetrizationEstimate {
    /// Hit-or-miss estimate of vol(−K ∩ K)/vol(K).
    pub ratio: f64,
    pub stderr: f64,
    pub points: usize,
    pub lower_bound: f64,
}

impl SymmetrizationEstimate {
    /// ratio ≥ 2^{−m}(1 − 3·SE/ratio), i.e. not below the bound beyond noise.
    pub fn holds(&self) -> bool {
        self.ratio + 3.0 * self.stderr >= self.lower_bound
    }
}

/// Fraction of uniform points x of K with −x ∈ K.
pub fn mc_symmetrization_ratio(
    body: &dyn ConvexBody,
    points: usize,
    stream: SeededStream,
) -> Result<SymmetrizationEstimate> {
    if points == 0 {
        return Err(Error::input("points must be at least 1"));
    }
    let mut g = stream.gaussian();
    let mut hits = 0usize;
    for _ in 0..points {
        let x = body.sample_uniform(&mut g);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        if body.contains(&neg) {
            hits += 1;
        }
    }
    let p = hits as f64 / points as f64;
    Ok(SymmetrizationEstimate {
        ratio: p,
        stderr: (p * (1.0 - p) / points as f64).sqrt(),
        points,
        lower_bound: 0.5f64.powi(body.dim() as i32),
    })
}

/// Symmetrization ratio of a random centred simplex in R^m, m ≤ 4.
pub fn mc_volume_symmetrization_check(
    m: usize,
    points: usize,
    stream: SeededStream,
) -> Result<SymmetrizationEstimate> {
    if !(1..=4).contains(&m) {
        return Err(Error::domain("simplex dimension must be in 1..=4"));
    }
    let simplex = Simplex::random_centered(m, &mut stream.child(0).gaussian())?;
    mc_symmetrization_ratio(&simplex, points, stream.child(1))
}

/// s₀(2) = (E‖G‖_{S₀}/d²)² with a delta-method standard error.
pub fn s0_estimate(d: usize, trials: usize, stream: SeededStream) -> Result<EstimateWithCI> {
    let samples = gue_gauge_samples(d, trials, stream)?;
    let values: Vec<f64> = samples.iter().map(|s| s.s0).collect();
    Ok(square_of_scaled_mean(
        &values,
        (d * d) as f64,
        stream.seed(),
    ))
}

/// (mean/scale)² with standard error 2·mean·se/scale².
fn square_of_scaled_mean(values: &[f64], scale: f64, seed: u64) -> EstimateWithCI {
    let g = EstimateWithCI::from_samples(values, seed);
    let r = g.mean / scale;
    EstimateWithCI {
        mean: r * r,
        stderr: 2.0 * r.abs() * g.stderr / scale,
        trials: g.trials,
        seed,
    }
}

/// PPT analogue of the threshold estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PptThresholdEstimate {
    pub d: usize,
    /// (E‖G‖_{PPT₀}/d²)².
    pub s0: EstimateWithCI,
    /// E‖G‖_{PPT₀}.
    pub mean_gauge: EstimateWithCI,
    /// w(PPT₀°) = E‖G‖_{PPT₀}/γ_m.
    pub polar_width: EstimateWithCI,
}

pub fn s0_ppt_estimate(
    d: usize,
    trials: usize,
    stream: SeededStream,
) -> Result<PptThresholdEstimate> {
    if d < 2 {
        return Err(Error::domain("d must be at least 2"));
    }
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    let n = d * d;
    let dims = ProductDims::bipartite(d, d)?;
    let values: Vec<f64> = map_trials(trials, stream, |_, s| {
        gauge_ppt0(&sample_gue0(n, s)?, &dims)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let seed = stream.seed();
    let mean_gauge = EstimateWithCI::from_samples(&values, seed);
    let gm = gamma_m(n * n - 1);
    Ok(PptThresholdEstimate {
        d,
        s0: square_of_scaled_mean(&values, (d * d) as f64, seed),
        mean_gauge,
        polar_width: EstimateWithCI {
            mean: mean_gauge.mean / gm,
            stderr: mean_gauge.stderr / gm,
            ..mean_gauge
        },
    })
}

/// E‖G‖_{D₀} for G ~ GUE⁰ on C^n.
pub fn mean_gauge_d0(n: usize, trials: usize, stream: SeededStream) -> Result<EstimateWithCI> {
    let values: Vec<f64> = map_trials(trials, stream, |_, s| gauge_d0(&sample_gue0(n, s)?))
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(EstimateWithCI::from_samples(&values, stream.seed()))
}

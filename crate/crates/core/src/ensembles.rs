//! Samplers for the random matrices and random states used by the experiments.
//!
//! All samplers are pure functions of a [`SeededStream`]. Draw order is fixed:
//! matrices are filled row-major, Hermitian ensembles fill the upper triangle
//! row by row (diagonal entry first).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::log_z;
use crate::linalg::{
    hermitian_eigenvalues, partial_trace, ComplexMatrix, HermitianOperator, ProductDims,
    TracelessHermitian,
};
use crate::rng::SeededStream;

/// Positive semidefinite, unit-trace operator together with its tensor
/// structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: ProductDims,
    op: HermitianOperator,
}

impl DensityMatrix {
    /// Validates unit trace (1e-12) and positivity (λ_min ≥ −1e-12·n).
    pub fn new(dims: ProductDims, op: HermitianOperator) -> Result<Self> {
        if dims.total() != op.dim() {
            return Err(Error::input(format!(
                "operator dimension {} does not match dims {:?}",
                op.dim(),
                dims.factors()
            )));
        }
        let tr = op.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!(
                "state must have unit trace, got {tr}"
            )));
        }
        let n = op.dim() as f64;
        let lmin = hermitian_eigenvalues(&op)?.min();
        if lmin < -1e-12 * n {
            return Err(Error::input(format!(
                "state is not positive (λ_min = {lmin:e})"
            )));
        }
        Ok(Self { dims, op })
    }

    /// Normalizes a Gram matrix A·A† by its trace. Returns `None` for a zero
    /// matrix.
    fn from_gram(dims: ProductDims, gram: HermitianOperator) -> Option<Self> {
        let tr = gram.trace();
        if tr <= 0.0 || !tr.is_finite() {
            return None;
        }
        Some(Self {
            dims,
            op: gram.scale(1.0 / tr),
        })
    }

    pub fn maximally_mixed(dims: ProductDims) -> Self {
        let n = dims.total();
        Self {
            op: HermitianOperator::identity(n).scale(1.0 / n as f64),
            dims,
        }
    }

    /// Pure state |ψ⟩⟨ψ| for a vector that is normalized here.
    pub fn pure(dims: ProductDims, psi: &[Complex64]) -> Result<Self> {
        if psi.len() != dims.total() {
            return Err(Error::input("state vector length does not match dims"));
        }
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::input("zero state vector"));
        }
        let op = HermitianOperator::projector(psi).scale(1.0 / norm2);
        Ok(Self { dims, op })
    }

    /// Id/n + A, rejected unless it is a valid state.
    pub fn from_centered(dims: ProductDims, a: &TracelessHermitian) -> Result<Self> {
        let n = dims.total();
        let op = a.operator().shift(1.0 / n as f64);
        Self::new(dims, op)
    }

    pub fn dims(&self) -> &ProductDims {
        &self.dims
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// ρ − Id/n as an element of M^{sa,0}_n.
    pub fn centered(&self) -> TracelessHermitian {
        TracelessHermitian::project(self.op.clone())
    }

    pub fn purity(&self) -> f64 {
        self.op.hs_inner(&self.op).re
    }

    pub fn with_dims(self, dims: ProductDims) -> Result<Self> {
        if dims.total() != self.dim() {
            return Err(Error::input("new dims do not match the state dimension"));
        }
        Ok(Self { dims, op: self.op })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Gue,
    Gue0,
    Ginibre,
    Induced,
    Uniform,
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gue" => Ok(Self::Gue),
            "gue0" => Ok(Self::Gue0),
            "ginibre" => Ok(Self::Ginibre),
            "induced" => Ok(Self::Induced),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::input(format!("unknown ensemble '{other}'"))),
        }
    }
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Gue => "gue",
            Self::Gue0 => "gue0",
            Self::Ginibre => "ginibre",
            Self::Induced => "induced",
            Self::Uniform => "uniform",
        };
        f.write_str(s)
    }
}

/// One member of the sampler family. `s` is the environment dimension for
/// induced states and the column count for Ginibre matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    pub s: usize,
}

/// A single draw from an [`EnsembleSpec`].
#[derive(Debug, Clone)]
pub enum Draw {
    Hermitian(HermitianOperator),
    Matrix(ComplexMatrix),
    State(DensityMatrix),
}

impl Draw {
    pub fn matrix(&self) -> &ComplexMatrix {
        match self {
            Draw::Hermitian(h) => h.matrix(),
            Draw::Matrix(m) => m,
            Draw::State(rho) => rho.operator().matrix(),
        }
    }

    /// Spectrum for the self-adjoint draws; singular values squared are not
    /// offered for Ginibre matrices.
    pub fn hermitian(&self) -> Option<&HermitianOperator> {
        match self {
            Draw::Hermitian(h) => Some(h),
            Draw::State(rho) => Some(rho.operator()),
            Draw::Matrix(_) => None,
        }
    }
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::input("n must be at least 1"));
        }
        if matches!(self.kind, EnsembleKind::Induced | EnsembleKind::Ginibre) && self.s == 0 {
            return Err(Error::input("s must be at least 1"));
        }
        Ok(())
    }

    pub fn sample(&self, stream: SeededStream) -> Result<Draw> {
        self.validate()?;
        Ok(match self.kind {
            EnsembleKind::Gue => Draw::Hermitian(sample_gue(self.n, stream)?),
            EnsembleKind::Gue0 => Draw::Hermitian(sample_gue0(self.n, stream)?.into_operator()),
            EnsembleKind::Ginibre => Draw::Matrix(sample_ginibre(self.n, self.s, stream)?),
            EnsembleKind::Induced => Draw::State(sample_induced_state(self.n, self.s, stream)?),
            EnsembleKind::Uniform => Draw::State(sample_uniform_state(self.n, stream)?),
        })
    }
}

/// GUE: density ∝ exp(−tr A²/2). Diagonal N(0,1), off-diagonal real and
/// imaginary parts N(0,1/2).
pub fn sample_gue(n: usize, stream: SeededStream) -> Result<HermitianOperator> {
    if n == 0 {
        return Err(Error::input("GUE dimension must be at least 1"));
    }
    let mut g = stream.gaussian();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(g.normal(), 0.0);
        for j in i + 1..n {
            let z = g.complex_normal();
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    Ok(HermitianOperator::from_hermitian_unchecked(m))
}

/// GUE⁰: GUE projected onto trace zero, the standard Gaussian vector of
/// M^{sa,0}_n.
pub fn sample_gue0(n: usize, stream: SeededStream) -> Result<TracelessHermitian> {
    Ok(TracelessHermitian::project(sample_gue(n, stream)?))
}

/// n×s matrix of i.i.d. complex normals with E|z|² = 1.
pub fn sample_ginibre(n: usize, s: usize, stream: SeededStream) -> Result<ComplexMatrix> {
    if n == 0 || s == 0 {
        return Err(Error::input("Ginibre dimensions must be positive"));
    }
    let mut g = stream.gaussian();
    let data = (0..n * s).map(|_| g.complex_normal()).collect();
    ComplexMatrix::from_vec(n, s, data)
}

/// Induced state on C^n with environment C^s, realized as AA†/tr(AA†).
pub fn sample_induced_state(n: usize, s: usize, stream: SeededStream) -> Result<DensityMatrix> {
    sample_induced_on(ProductDims::single(n)?, s, stream)
}

/// Induced state carrying the given tensor structure.
pub fn sample_induced_on(
    dims: ProductDims,
    s: usize,
    stream: SeededStream,
) -> Result<DensityMatrix> {
    let n = dims.total();
    if s == 0 {
        return Err(Error::input("environment dimension s must be at least 1"));
    }
    // a zero Ginibre matrix has probability zero; redraw on a child stream
    let mut attempt = 0;
    loop {
        let sub = if attempt == 0 {
            stream
        } else {
            stream.child(attempt)
        };
        let a = sample_ginibre(n, s, sub)?;
        if let Some(rho) = DensityMatrix::from_gram(dims.clone(), a.gram()) {
            return Ok(rho);
        }
        attempt += 1;
    }
}

/// Hilbert–Schmidt uniform state: the induced measure with s = n.
pub fn sample_uniform_state(n: usize, stream: SeededStream) -> Result<DensityMatrix> {
    sample_induced_state(n, n, stream)
}

/// log of the induced density (det ρ)^{s−n}/Z_{n,s} with respect to
/// Lebesgue measure on the states. Real s ≥ n is accepted.
pub fn induced_log_density(rho: &DensityMatrix, s: f64) -> Result<f64> {
    let n = rho.dim();
    if !(s >= n as f64) {
        return Err(Error::domain(format!(
            "induced density needs s ≥ n (s = {s}, n = {n})"
        )));
    }
    let lz = log_z(n, s)?;
    let exponent = s - n as f64;
    if exponent == 0.0 {
        return Ok(-lz);
    }
    let spec = hermitian_eigenvalues(rho.operator())?;
    if spec.min() <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let log_det: f64 = spec.as_slice().iter().map(|l| l.ln()).sum();
    Ok(exponent * log_det - lz)
}

/// Output of a coupled sampler: `larger` lives on the bigger space and its
/// separability (or PPT property) transfers to `smaller`.
#[derive(Debug, Clone)]
pub struct CoupledStates {
    pub larger: DensityMatrix,
    pub smaller: DensityMatrix,
    /// Number of measure-zero redraws that were needed.
    pub resamples: usize,
}

/// ρ₂ ~ μ_{d2²,s} on C^{d2}⊗C^{d2} and its compression ρ₁ = Pρ₂P/tr(Pρ₂P)
/// to C^{d1}⊗C^{d1}, P = Q⊗Q with Q the projection onto the first d1 basis
/// vectors.
pub fn coupled_projection_sample(
    d1: usize,
    d2: usize,
    s: usize,
    stream: SeededStream,
) -> Result<CoupledStates> {
    if d1 < 2 || d1 > d2 {
        return Err(Error::input(format!(
            "need 2 ≤ d1 ≤ d2, got d1 = {d1}, d2 = {d2}"
        )));
    }
    if s == 0 {
        return Err(Error::input("s must be at least 1"));
    }
    let large_dims = ProductDims::bipartite(d2, d2)?;
    let small_dims = ProductDims::bipartite(d1, d1)?;
    let mut resamples = 0;
    loop {
        let sub = if resamples == 0 {
            stream
        } else {
            stream.child(resamples as u64)
        };
        let a = sample_ginibre(d2 * d2, s, sub)?;
        let Some(larger) = DensityMatrix::from_gram(large_dims.clone(), a.gram()) else {
            resamples += 1;
            continue;
        };
        // rows of P·A that survive the compression, in the small index order
        let mut rows = Vec::with_capacity(d1 * d1 * s);
        for i in 0..d1 {
            for j in 0..d1 {
                rows.extend_from_slice(a.row(i * d2 + j));
            }
        }
        let b = ComplexMatrix::from_vec(d1 * d1, s, rows)?;
        match DensityMatrix::from_gram(small_dims.clone(), b.gram()) {
            Some(smaller) => {
                return Ok(CoupledStates {
                    larger,
                    smaller,
                    resamples,
                })
            }
            None => resamples += 1,
        }
    }
}

/// ρ ~ μ_{4d²,s} on C^{2d}⊗C^{2d} with C^{2d} = C²⊗C^d, and its partial
/// trace over the two qubit factors, which is μ_{d²,4s}-distributed.
pub fn coupled_partial_trace_sample(
    d: usize,
    s: usize,
    stream: SeededStream,
) -> Result<CoupledStates> {
    if d < 2 {
        return Err(Error::input("need d ≥ 2"));
    }
    let larger = sample_induced_on(ProductDims::bipartite(2 * d, 2 * d)?, s, stream)?;
    let fine = ProductDims::new(&[2, d, 2, d])?;
    let reduced = partial_trace(larger.operator(), &fine, &[1, 3])?;
    let smaller = DensityMatrix {
        dims: ProductDims::bipartite(d, d)?,
        op: reduced,
    };
    Ok(CoupledStates {
        larger,
        smaller,
        resamples: 0,
    })
}

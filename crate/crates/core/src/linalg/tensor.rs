//! Tensor-product structure.
//!
//! Index convention used throughout the crate: a basis vector
//! |i₁⟩⊗…⊗|i_k⟩ of C^{d₁}⊗…⊗C^{d_k} has flat index
//! i₁·(d₂⋯d_k) + i₂·(d₃⋯d_k) + … + i_k, i.e. the first factor is the most
//! significant digit. `kron`, `partial_trace` and `partial_transpose` all
//! follow it.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HermitianOperator};
use crate::error::{Error, Result};

/// Local dimensions of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductDims {
    factors: Vec<usize>,
}

impl ProductDims {
    /// Multipartite dimensions; every factor must be at least 2.
    pub fn new(factors: &[usize]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::input("at least one tensor factor is required"));
        }
        if let Some(&d) = factors.iter().find(|&&d| d < 2) {
            return Err(Error::input(format!("factor dimension {d} is below 2")));
        }
        Ok(Self {
            factors: factors.to_vec(),
        })
    }

    /// An unstructured space C^n seen as a single factor (n = 1 allowed).
    pub fn single(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("dimension must be positive"));
        }
        Ok(Self { factors: vec![n] })
    }

    pub fn bipartite(d1: usize, d2: usize) -> Result<Self> {
        Self::new(&[d1, d2])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Total dimension n = ∏ dᵢ.
    pub fn total(&self) -> usize {
        self.factors.iter().product()
    }

    /// m = n² − 1, the real dimension of the traceless self-adjoint operators.
    pub fn traceless_dim(&self) -> usize {
        let n = self.total();
        n * n - 1
    }

    pub fn is_bipartite(&self) -> bool {
        self.factors.len() == 2
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for f in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[f] = strides[f + 1] * self.factors[f + 1];
        }
        strides
    }

    /// Digits of a flat index, most significant factor first.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for f in (0..self.factors.len()).rev() {
            out[f] = index % self.factors[f];
            index /= self.factors[f];
        }
        out
    }

    pub fn flat_index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    fn check_operator(&self, h: &HermitianOperator) -> Result<()> {
        if h.dim() != self.total() {
            return Err(Error::input(format!(
                "operator of dimension {} does not match factors {:?}",
                h.dim(),
                self.factors
            )));
        }
        Ok(())
    }
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Tensor product of vectors, first factor most significant.
pub fn kron_vectors(parts: &[Vec<Complex64>]) -> Vec<Complex64> {
    parts.iter().fold(vec![Complex64::new(1.0, 0.0)], |acc, v| {
        let mut out = Vec::with_capacity(acc.len() * v.len());
        for a in &acc {
            for b in v {
                out.push(a * b);
            }
        }
        out
    })
}

/// Traces out every factor not listed in `kept`. The output acts on the kept
/// factors in increasing factor order.
pub fn partial_trace(
    h: &HermitianOperator,
    dims: &ProductDims,
    kept: &[usize],
) -> Result<HermitianOperator> {
    dims.check_operator(h)?;
    let k = dims.num_factors();
    let mut keep = vec![false; k];
    for &f in kept {
        if f >= k {
            return Err(Error::input(format!(
                "factor index {f} out of range for {k} factors"
            )));
        }
        keep[f] = true;
    }
    let n = dims.total();
    let strides = dims.strides();
    let out_dim: usize = (0..k)
        .filter(|&f| keep[f])
        .map(|f| dims.factors[f])
        .product();

    // split each flat index into (kept part, traced part)
    let mut kept_idx = vec![0usize; n];
    let mut traced_idx = vec![0usize; n];
    for i in 0..n {
        let (mut kp, mut tp) = (0, 0);
        for f in 0..k {
            let digit = (i / strides[f]) % dims.factors[f];
            if keep[f] {
                kp = kp * dims.factors[f] + digit;
            } else {
                tp = tp * dims.factors[f] + digit;
            }
        }
        kept_idx[i] = kp;
        traced_idx[i] = tp;
    }

    let m = h.matrix();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for i in 0..n {
        for j in 0..n {
            if traced_idx[i] == traced_idx[j] {
                out[(kept_idx[i], kept_idx[j])] += m[(i, j)];
            }
        }
    }
    HermitianOperator::new(out)
}

/// Transposes the given tensor factor. Exactly involutive.
pub fn partial_transpose(
    h: &HermitianOperator,
    dims: &ProductDims,
    transposed: usize,
) -> Result<HermitianOperator> {
    dims.check_operator(h)?;
    if transposed >= dims.num_factors() {
        return Err(Error::input(format!(
            "factor index {transposed} out of range for {} factors",
            dims.num_factors()
        )));
    }
    let n = dims.total();
    let stride = dims.strides()[transposed];
    let d = dims.factors[transposed];
    let m = h.matrix();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let a = (i / stride) % d;
        for j in 0..n {
            let b = (j / stride) % d;
            let src_i = i - a * stride + b * stride;
            let src_j = j - b * stride + a * stride;
            out[(i, j)] = m[(src_i, src_j)];
        }
    }
    Ok(HermitianOperator::from_hermitian_unchecked(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn phi_plus() -> HermitianOperator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        HermitianOperator::projector(&[c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)])
    }

    #[test]
    fn identity_kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_shape_and_trace() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1., 0.), c(2., 1.), c(0., 3.), c(4., 0.)])
            .unwrap();
        let b = ComplexMatrix::from_vec(
            3,
            3,
            (0..9).map(|k| c(k as f64, -(k as f64) / 2.0)).collect(),
        )
        .unwrap();
        let ab = kron(&a, &b);
        assert_eq!(ab.shape(), (6, 6));
        let diff = ab.trace() - a.trace() * b.trace();
        assert!(diff.norm() < 1e-12);
    }

    #[test]
    fn maximally_entangled_marginal() {
        let dims = ProductDims::bipartite(2, 2).unwrap();
        let rho_a = partial_trace(&phi_plus(), &dims, &[0]).unwrap();
        let expect = HermitianOperator::identity(2).scale(0.5);
        assert!(rho_a.sub(&expect).unwrap().hs_norm() < 1e-15);
    }

    #[test]
    fn product_marginals_factor() {
        let a = HermitianOperator::from_real_diagonal(&[0.7, 0.3]);
        let b = HermitianOperator::new(
            ComplexMatrix::from_vec(
                3,
                3,
                vec![
                    c(0.5, 0.),
                    c(0.1, 0.2),
                    c(0., 0.),
                    c(0.1, -0.2),
                    c(0.3, 0.),
                    c(0.05, 0.),
                    c(0., 0.),
                    c(0.05, 0.),
                    c(0.2, 0.),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let ab = HermitianOperator::new(kron(a.matrix(), b.matrix())).unwrap();
        let dims = ProductDims::bipartite(2, 3).unwrap();
        assert!(
            partial_trace(&ab, &dims, &[0])
                .unwrap()
                .sub(&a)
                .unwrap()
                .hs_norm()
                < 1e-15
        );
        assert!(
            partial_trace(&ab, &dims, &[1])
                .unwrap()
                .sub(&b)
                .unwrap()
                .hs_norm()
                < 1e-15
        );
        // tracing everything leaves the scalar trace
        let t = partial_trace(&ab, &dims, &[]).unwrap();
        assert_eq!(t.dim(), 1);
        assert!((t.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_transpose_of_product() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1., 0.), c(0., 2.), c(0., -2.), c(3., 0.)])
            .unwrap();
        let b = ComplexMatrix::from_vec(2, 2, vec![c(0.5, 0.), c(1., 1.), c(1., -1.), c(-1., 0.)])
            .unwrap();
        let h = HermitianOperator::new(kron(&a, &b)).unwrap();
        let dims = ProductDims::bipartite(2, 2).unwrap();
        let pt = partial_transpose(&h, &dims, 1).unwrap();
        let expect = kron(&a, &b.transpose());
        assert!(pt.matrix().sub(&expect).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn bad_dims_rejected() {
        let dims = ProductDims::bipartite(2, 3).unwrap();
        let h = HermitianOperator::identity(4);
        assert!(partial_trace(&h, &dims, &[0]).is_err());
        let h = HermitianOperator::identity(6);
        assert!(partial_transpose(&h, &dims, 2).is_err());
        assert!(partial_trace(&h, &dims, &[5]).is_err());
        assert!(ProductDims::new(&[2, 1]).is_err());
        assert!(ProductDims::new(&[]).is_err());
    }

    #[test]
    fn digits_round_trip() {
        let dims = ProductDims::new(&[2, 3, 4]).unwrap();
        for i in 0..24 {
            assert_eq!(dims.flat_index(&dims.digits(i)), i);
        }
        assert_eq!(dims.digits(23), vec![1, 2, 3]);
    }
}

//! Dense complex linear algebra over the Hilbert–Schmidt inner product.

mod eigen;
mod matrix;
mod tensor;

use num_complex::Complex64;

pub use eigen::{
    hermitian_eigen, hermitian_eigenvalues, max_eigenvalue, min_eigenvalue, top_eigenpair,
    EigenDecomposition,
};
pub use matrix::{ComplexMatrix, HermitianOperator, SortedRealVector, TracelessHermitian};
pub use tensor::{kron, kron_vectors, partial_trace, partial_transpose, ProductDims};

use crate::error::{Error, Result};

/// Maps coordinates in R^{n²−1} to M^{sa,0}_n through a Hilbert–Schmidt
/// orthonormal (generalized Gell-Mann) basis, so Euclidean geometry is
/// preserved: |coords| = ‖A‖_HS.
///
/// Layout: for each pair j < k two coordinates (real, imaginary part of the
/// (j,k) entry scaled by √2), followed by the n−1 diagonal directions
/// diag(1,…,1,−l,0,…)/√(l(l+1)).
pub fn traceless_from_coordinates(n: usize, coords: &[f64]) -> Result<TracelessHermitian> {
    if n == 0 || coords.len() != n * n - 1 {
        return Err(Error::input(format!(
            "expected {} coordinates for n = {n}",
            (n * n).saturating_sub(1)
        )));
    }
    let mut m = ComplexMatrix::zeros(n, n);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut it = coords.iter();
    for j in 0..n {
        for k in j + 1..n {
            let re = *it.next().unwrap();
            let im = *it.next().unwrap();
            let z = Complex64::new(re * inv_sqrt2, im * inv_sqrt2);
            m[(j, k)] = z;
            m[(k, j)] = z.conj();
        }
    }
    for l in 1..n {
        let a = *it.next().unwrap();
        let scale = a / ((l * (l + 1)) as f64).sqrt();
        for i in 0..l {
            m[(i, i)].re += scale;
        }
        m[(l, l)].re -= scale * l as f64;
    }
    Ok(TracelessHermitian::project(HermitianOperator::new(m)?))
}

//! Dense Hermitian eigensolver.
//!
//! Householder reflections reduce the operator to a Hermitian tridiagonal
//! matrix, a diagonal unitary rotates the off-diagonal to real non-negative
//! values, and implicit-shift QL iterations diagonalize the resulting real
//! symmetric tridiagonal. Eigenvectors, when requested, are accumulated
//! through all three stages.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HermitianOperator, SortedRealVector};
use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 100;

/// Eigenvalues in non-increasing order with matching eigenvectors stored as
/// the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        let n = self.vectors.rows();
        (0..n).map(|i| self.vectors[(i, k)]).collect()
    }
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`; the last entry is zero.
    off: Vec<f64>,
    basis: Option<ComplexMatrix>,
}

fn check_finite(h: &HermitianOperator) -> Result<()> {
    if h.matrix()
        .as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::input("eigensolver input has non-finite entries"));
    }
    Ok(())
}

fn tridiagonalize(h: &HermitianOperator, want_basis: bool) -> Tridiagonal {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut q = want_basis.then(|| ComplexMatrix::identity(n));
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut p = vec![Complex64::new(0.0, 0.0); n];

    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let alpha = a[(lo, k)];
        let sigma: f64 = (lo + 1..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if sigma == 0.0 {
            continue;
        }
        let xnorm = (alpha.norm_sqr() + sigma).sqrt();
        let phase = if alpha.norm() > 0.0 {
            alpha / alpha.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let v0 = alpha + phase * xnorm;
        let vnorm = (v0.norm_sqr() + sigma).sqrt();
        w[lo] = v0 / vnorm;
        for i in lo + 1..n {
            w[i] = a[(i, k)] / vnorm;
        }

        let beta = -phase * xnorm;
        a[(lo, k)] = beta;
        a[(k, lo)] = beta.conj();
        for i in lo + 1..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
            a[(k, i)] = Complex64::new(0.0, 0.0);
        }

        // trailing block: B ← B − 2(w q† + q w†), q = Bw − (w†Bw) w
        for i in lo..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in lo..n {
                acc += a[(i, j)] * w[j];
            }
            p[i] = acc;
        }
        let kappa: f64 = (lo..n).map(|i| (w[i].conj() * p[i]).re).sum();
        for i in lo..n {
            p[i] -= w[i] * kappa;
        }
        for i in lo..n {
            for j in lo..n {
                a[(i, j)] -= (w[i] * p[j].conj() + p[i] * w[j].conj()) * 2.0;
            }
            a[(i, i)].im = 0.0;
        }

        if let Some(q) = q.as_mut() {
            for r in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in lo..n {
                    acc += q[(r, j)] * w[j];
                }
                for j in lo..n {
                    q[(r, j)] -= acc * w[j].conj() * 2.0;
                }
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut off = vec![0.0; n];
    let mut phase = Complex64::new(1.0, 0.0);
    let mut phases = vec![phase; n];
    for i in 0..n.saturating_sub(1) {
        let e = a[(i + 1, i)];
        let mag = e.norm();
        off[i] = mag;
        if mag > 0.0 {
            phase *= e / mag;
        }
        phases[i + 1] = phase;
    }
    if let Some(q) = q.as_mut() {
        for r in 0..n {
            for (j, ph) in phases.iter().enumerate() {
                q[(r, j)] *= ph;
            }
        }
    }
    Tridiagonal {
        diag,
        off,
        basis: q,
    }
}

/// Implicit QL with Wilkinson-style shifts on a real symmetric tridiagonal.
/// Rotations are applied to the columns of `basis` when present.
fn tridiagonal_ql(
    d: &mut [f64],
    e: &mut [f64],
    mut basis: Option<&mut ComplexMatrix>,
) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::domain("tridiagonal QL iteration failed to converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = basis.as_deref_mut() {
                    for k in 0..z.rows() {
                        let zf = z[(k, i + 1)];
                        let zi = z[(k, i)];
                        z[(k, i + 1)] = zi * s + zf * c;
                        z[(k, i)] = zi * c - zf * s;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// All eigenvalues of `h`, non-increasing.
pub fn hermitian_eigenvalues(h: &HermitianOperator) -> Result<SortedRealVector> {
    check_finite(h)?;
    let Tridiagonal {
        mut diag, mut off, ..
    } = tridiagonalize(h, false);
    tridiagonal_ql(&mut diag, &mut off, None)?;
    SortedRealVector::from_unsorted(diag)
}

/// Full eigendecomposition, eigenvalues non-increasing.
pub fn hermitian_eigen(h: &HermitianOperator) -> Result<EigenDecomposition> {
    check_finite(h)?;
    let n = h.dim();
    let Tridiagonal {
        mut diag,
        mut off,
        basis,
    } = tridiagonalize(h, true);
    let mut basis = basis.expect("basis requested");
    tridiagonal_ql(&mut diag, &mut off, Some(&mut basis))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[b].total_cmp(&diag[a]));
    let values = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = basis[(r, src)];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Largest eigenvalue and a unit eigenvector for it.
pub fn top_eigenpair(h: &HermitianOperator) -> Result<(f64, Vec<Complex64>)> {
    if h.dim() == 0 {
        return Err(Error::input("empty operator has no eigenpair"));
    }
    let dec = hermitian_eigen(h)?;
    let mut v = dec.vector(0);
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    Ok((dec.values[0], v))
}

pub fn min_eigenvalue(h: &HermitianOperator) -> Result<f64> {
    Ok(hermitian_eigenvalues(h)?.min())
}

pub fn max_eigenvalue(h: &HermitianOperator) -> Result<f64> {
    Ok(hermitian_eigenvalues(h)?.max())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(h: &HermitianOperator, lambda: f64, v: &[Complex64]) -> f64 {
        let hv = h.matrix().mat_vec(v);
        hv.iter()
            .zip(v)
            .map(|(a, b)| (a - b * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let h = HermitianOperator::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let ev = hermitian_eigenvalues(&h).unwrap();
        assert_eq!(ev.as_slice(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn pauli_x() {
        let m = ComplexMatrix::from_vec(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
            .unwrap();
        let ev = hermitian_eigenvalues(&HermitianOperator::new(m).unwrap()).unwrap();
        assert!((ev.as_slice()[0] - 1.0).abs() < 1e-15);
        assert!((ev.as_slice()[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_y_vectors() {
        let m = ComplexMatrix::from_vec(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
            .unwrap();
        let h = HermitianOperator::new(m).unwrap();
        let dec = hermitian_eigen(&h).unwrap();
        for k in 0..2 {
            assert!(residual(&h, dec.values[k], &dec.vector(k)) < 1e-14);
        }
    }

    #[test]
    fn top_pair_of_diag_and_sigma_z() {
        let (l, v) = top_eigenpair(&HermitianOperator::from_real_diagonal(&[5.0, -1.0])).unwrap();
        assert_eq!(l, 5.0);
        assert!((v[0].norm() - 1.0).abs() < 1e-15 && v[1].norm() < 1e-15);
        let (l, v) = top_eigenpair(&HermitianOperator::from_real_diagonal(&[1.0, -1.0])).unwrap();
        assert_eq!(l, 1.0);
        assert!((v[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert!(HermitianOperator::new(m.clone()).is_err());
        let h = HermitianOperator::from_hermitian_unchecked(m);
        assert!(matches!(hermitian_eigenvalues(&h), Err(Error::Input(_))));
    }

    #[test]
    fn empty_and_scalar() {
        assert!(hermitian_eigenvalues(&HermitianOperator::zeros(0))
            .unwrap()
            .is_empty());
        let ev = hermitian_eigenvalues(&HermitianOperator::from_real_diagonal(&[-2.5])).unwrap();
        assert_eq!(ev.as_slice(), &[-2.5]);
    }

    #[test]
    fn already_tridiagonal_with_zero_couplings() {
        // block-diagonal input exercises the sigma == 0 skip and deflation
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(2.0, 0.0);
        m[(2, 3)] = c(0.0, 1.0);
        m[(3, 2)] = c(0.0, -1.0);
        let h = HermitianOperator::new(m).unwrap();
        let dec = hermitian_eigen(&h).unwrap();
        let expect = [2.0, 1.0, 1.0, -1.0];
        for (a, b) in dec.values.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        for k in 0..4 {
            assert!(residual(&h, dec.values[k], &dec.vector(k)) < 1e-14);
        }
    }
}

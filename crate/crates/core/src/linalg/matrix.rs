use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting shape mismatches and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::input(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::input("matrix has non-finite entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Rank-one projector |v⟩⟨v|.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::input(format!(
                "shape mismatch {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::input(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// A·A†, computed from row inner products so only the upper triangle is
    /// evaluated.
    pub fn gram(&self) -> HermitianOperator {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            let ri = self.row(i);
            for j in i..n {
                let rj = self.row(j);
                let mut acc = ZERO;
                for (a, b) in ri.iter().zip(rj) {
                    acc += a * b.conj();
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
        for i in 0..n {
            out[(i, i)].im = 0.0;
        }
        HermitianOperator { inner: out }
    }

    pub fn mat_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Self-adjoint matrix. Hermiticity is enforced on construction by replacing
/// the input with (H + H†)/2, so later arithmetic never sees drift.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    inner: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::input(format!(
                "Hermitian operator must be square, got {:?}",
                m.shape()
            )));
        }
        if m.data
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::input("operator has non-finite entries"));
        }
        let n = m.rows;
        let mut out = m;
        for i in 0..n {
            out[(i, i)].im = 0.0;
            for j in i + 1..n {
                let avg = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        Ok(Self { inner: out })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(n),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            inner: ComplexMatrix::from_real_diagonal(diag),
        }
    }

    /// Projector onto a (not necessarily normalized) vector.
    pub fn projector(v: &[Complex64]) -> Self {
        let mut inner = ComplexMatrix::outer(v);
        for i in 0..v.len() {
            inner[(i, i)].im = 0.0;
        }
        Self { inner }
    }

    /// Wraps a matrix the caller has already made exactly self-adjoint.
    pub(crate) fn from_hermitian_unchecked(inner: ComplexMatrix) -> Self {
        debug_assert!(inner.is_square());
        Self { inner }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    /// Hilbert–Schmidt inner product tr(AB); real for self-adjoint A, B.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        // tr(AB) = Σ_ij A_ij B_ji = Σ_ij A_ij conj(B_ij)
        self.inner
            .data
            .iter()
            .zip(&other.inner.data)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            inner: self.inner.scale(c),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.add(&other.inner)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.sub(&other.inner)?,
        })
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// H + c·Id.
    pub fn shift(&self, c: f64) -> Self {
        let mut inner = self.inner.clone();
        for i in 0..self.dim() {
            inner[(i, i)].re += c;
        }
        Self { inner }
    }

    /// ⟨v|H|v⟩.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let hv = self.inner.mat_vec(v);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// U H U†.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.matmul(&self.inner)?.matmul(&u.adjoint())?;
        Self::new(m)
    }
}

/// Self-adjoint operator with zero trace: an element of the hyperplane the
/// centred convex bodies live in.
#[derive(Debug, Clone, PartialEq)]
pub struct TracelessHermitian {
    op: HermitianOperator,
}

impl TracelessHermitian {
    /// Projects onto trace zero by subtracting tr(H)/n · Id.
    pub fn project(h: HermitianOperator) -> Self {
        let n = h.dim();
        if n == 0 {
            return Self { op: h };
        }
        let t = h.trace() / n as f64;
        let mut op = h.shift(-t);
        // second pass absorbs the rounding of the first
        let residual = op.trace();
        if residual != 0.0 {
            op = op.shift(-residual / n as f64);
        }
        Self { op }
    }

    /// Accepts `h` only when it is already traceless up to
    /// 1e-12·(‖h‖_HS + 1), then re-projects to exact trace zero.
    pub fn new(h: HermitianOperator) -> Result<Self> {
        let t = h.trace();
        if t.abs() > 1e-12 * (h.hs_norm() + 1.0) {
            return Err(Error::input(format!(
                "operator is not traceless (trace {t:e})"
            )));
        }
        Ok(Self::project(h))
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            op: HermitianOperator::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }

    pub fn hs_norm(&self) -> f64 {
        self.op.hs_norm()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            op: self.op.scale(c),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.op.matrix().as_slice().iter().all(|z| *z == ZERO)
    }
}

/// Real vector kept in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedRealVector(Vec<f64>);

impl SortedRealVector {
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite value in spectrum"));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0[0]
    }

    pub fn min(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

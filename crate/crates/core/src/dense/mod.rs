//! Dense complex matrix kernels.
//!
//! Everything downstream works on one matrix type, [`ComplexMatrix`]:
//! double-precision complex entries in row-major order. The kernels here are
//! self-contained (no external linear algebra backend): LU solves, a
//! Hessenberg + shifted-QR eigensolver, a one-sided Jacobi SVD, a Pade-based
//! matrix exponential, and Lyapunov/Stein solvers in diagonal closed form and
//! in dense (Schur) form.

mod eig;
mod expm;
mod lu;
mod lyapunov;
mod svd;

pub use eig::{eig, schur, Eig, Schur};
pub use expm::expm;
pub use lu::{cholesky, solve, Lu};
pub use lyapunov::{lyap_ct, lyap_dense, stein_dense, stein_dt, SylvesterMode};
pub use svd::{svd, Svd};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Shorthand for a complex scalar.
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from raw row-major data, rejecting non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: k / cols.max(1),
                    col: k % cols.max(1),
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real-valued input, zero imaginary parts.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged row lengths".into()));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Scalar 1x1 matrix.
    pub fn scalar(z: Complex64) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    /// Largest absolute imaginary part, used by realification checks.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Drop imaginary parts.
    pub fn into_real(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex64::new(z.re, 0.0))
                .collect(),
        }
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Complex64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn block(&self, row0: usize, col0: usize, h: usize, w: usize) -> Self {
        debug_assert!(row0 + h <= self.rows && col0 + w <= self.cols);
        Self::from_fn(h, w, |i, j| self[(row0 + i, col0 + j)])
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, m: &ComplexMatrix) {
        debug_assert!(row0 + m.rows <= self.rows && col0 + m.cols <= self.cols);
        for i in 0..m.rows {
            for j in 0..m.cols {
                self[(row0 + i, col0 + j)] = m[(i, j)];
            }
        }
    }

    /// Keep the leading `k` columns.
    pub fn take_columns(&self, k: usize) -> Self {
        self.block(0, 0, self.rows, k)
    }

    pub fn hstack(blocks: &[&ComplexMatrix]) -> Self {
        let rows = blocks[0].rows;
        debug_assert!(blocks.iter().all(|b| b.rows == rows));
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let mut at = 0;
        for b in blocks {
            m.set_block(0, at, b);
            at += b.cols;
        }
        m
    }

    pub fn vstack(blocks: &[&ComplexMatrix]) -> Self {
        let cols = blocks[0].cols;
        debug_assert!(blocks.iter().all(|b| b.cols == cols));
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut m = Self::zeros(rows, cols);
        let mut at = 0;
        for b in blocks {
            m.set_block(at, 0, b);
            at += b.rows;
        }
        m
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        Self::from_fn(
            self.rows * other.rows,
            self.cols * other.cols,
            |i, j| self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)],
        )
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// `self * v` for a column vector given as a slice.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(self.cols, v.len());
        let mut out = vec![Complex64::default(); self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut acc = Complex64::default();
            for (a, b) in row.iter().zip(v.iter()) {
                acc += a * b;
            }
            out[i] = acc;
        }
        out
    }
}

/// Column-orthonormal basis of the column space via modified Gram-Schmidt
/// with one re-orthogonalization pass. Columns below `drop_tol` times the
/// largest column norm are dropped.
pub fn orthonormal_columns(m: &ComplexMatrix, drop_tol: f64) -> ComplexMatrix {
    let rows = m.rows();
    let mut kept: Vec<Vec<Complex64>> = Vec::new();
    let scale = (0..m.cols())
        .map(|j| m.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for j in 0..m.cols() {
        let mut x = m.column(j);
        for _ in 0..2 {
            for q in &kept {
                let mut dot = Complex64::default();
                for i in 0..rows {
                    dot += q[i].conj() * x[i];
                }
                for i in 0..rows {
                    let upd = q[i] * dot;
                    x[i] -= upd;
                }
            }
        }
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > drop_tol * scale {
            for v in x.iter_mut() {
                *v /= norm;
            }
            kept.push(x);
        }
    }
    let mut out = ComplexMatrix::zeros(rows, kept.len());
    for (j, q) in kept.iter().enumerate() {
        for i in 0..rows {
            out[(i, j)] = q[i];
        }
    }
    out
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

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        // i-k-j order keeps the inner loop contiguous for row-major storage.
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::default() {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, r) in orow.iter_mut().zip(rrow.iter()) {
                    *o += a * r;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| -z).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4e}{:+.4e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = ComplexMatrix::new(1, 2, vec![c64(1.0, 0.0), c64(f64::NAN, 0.0)]);
        assert!(matches!(err, Err(Error::NonFinite { row: 0, col: 1 })));
    }

    #[test]
    fn matmul_identity() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| c64((i * 3 + j) as f64, 1.0));
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(&a * &i3, a);
    }

    #[test]
    fn kron_dims() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::from_real(3, 1, &[1.0, 2.0, 3.0]).unwrap();
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (6, 2));
        assert_eq!(k[(4, 1)], c64(2.0, 0.0));
        assert_eq!(k[(4, 0)], c64(0.0, 0.0));
    }

    #[test]
    fn adjoint_conjugates() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| c64(i as f64, j as f64));
        let h = a.adjoint();
        assert_eq!(h[(2, 1)], c64(1.0, -2.0));
    }
}

//! Dense complex matrices at working precision, plus the small amount of
//! extended-precision matrix arithmetic the experiment generator needs.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};
use core::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hiprec::XScalar;

pub type C64 = Complex64;

/// Counts matrix–matrix products. Increments are atomic so that independent
/// evaluations may share one counter.
#[derive(Debug, Default)]
pub struct MulCounter(AtomicUsize);

impl MulCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> usize {
        self.0.load(Ordering::Relaxed)
    }

    pub fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "from_vec",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// True when every entry strictly below the diagonal is exactly zero.
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)] == C64::new(0.0, 0.0)))
    }

    pub fn check_upper_triangular(&self) -> Result<()> {
        if self.is_upper_triangular() {
            Ok(())
        } else {
            Err(Error::InvalidParameter("matrix is not upper triangular".into()))
        }
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    /// Copy of rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &CMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    fn check_same(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch { op, left: self.shape(), right: other.shape() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "add")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(CMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "sub")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(CMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: C64, other: &Self) -> Result<()> {
        self.check_same(other, "axpy")?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// Adds `s` to each diagonal entry.
    pub fn shift_diagonal(&mut self, s: C64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += s;
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn norms(&self) -> Norms {
        norms(self)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Counted matrix product.
pub fn matmul(a: &CMatrix, b: &CMatrix, ctr: &MulCounter) -> Result<CMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch { op: "matmul", left: a.shape(), right: b.shape() });
    }
    let mut out = CMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            let brow = &b.data[k * b.cols..(k + 1) * b.cols];
            for (o, bkj) in orow.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    ctr.bump();
    Ok(out)
}

/// The norms reported by the pipeline and the harness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    /// Maximum column sum.
    pub one_induced: f64,
    pub frobenius: f64,
    pub max_abs: f64,
    /// Largest singular value by power iteration on `AᴴA`.
    pub two_induced_estimate: f64,
}

pub fn one_norm(a: &CMatrix) -> f64 {
    (0..a.cols).map(|j| (0..a.rows).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn frobenius_norm(a: &CMatrix) -> f64 {
    let scale = max_abs(a);
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = a.data.iter().map(|v| (v / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Power iteration for the spectral norm, stopping once the estimate changes
/// by less than 1e-12 relative between sweeps.
pub fn two_norm_estimate(a: &CMatrix) -> f64 {
    let scale = max_abs(a);
    if scale == 0.0 {
        return 0.0;
    }
    let n = a.cols;
    // deterministic start vector with no special structure
    let mut v: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + 0.37 * ((i * 7 + 3) % 11) as f64, 0.21 * ((i * 5 + 1) % 7) as f64))
        .collect();
    let mut est = 0.0f64;
    for _ in 0..5000 {
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv == 0.0 {
            break;
        }
        v.iter_mut().for_each(|z| *z /= nv);
        // w = A v / scale
        let w: Vec<C64> = (0..a.rows)
            .map(|i| (0..n).map(|j| a[(i, j)] / scale * v[j]).sum())
            .collect();
        let next = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // v = Aᴴ w
        v = (0..n).map(|j| (0..a.rows).map(|i| (a[(i, j)] / scale).conj() * w[i]).sum()).collect();
        if (next - est).abs() <= 1e-12 * next {
            est = next;
            break;
        }
        est = next;
    }
    est * scale
}

pub fn norms(a: &CMatrix) -> Norms {
    Norms {
        one_induced: one_norm(a),
        frobenius: frobenius_norm(a),
        max_abs: max_abs(a),
        two_induced_estimate: two_norm_estimate(a),
    }
}

/// Dense real matrix of extended-precision scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct XMatrix {
    rows: usize,
    cols: usize,
    data: Vec<XScalar>,
}

impl XMatrix {
    pub fn zeros(rows: usize, cols: usize, digits: u32) -> Self {
        XMatrix { rows, cols, data: vec![XScalar::zero(digits); rows * cols] }
    }

    pub fn identity(n: usize, digits: u32) -> Self {
        let mut m = Self::zeros(n, n, digits);
        for i in 0..n {
            m[(i, i)] = XScalar::one(digits);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> XScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        XMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| C64::new(self[(i, j)].to_f64(), 0.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> XScalar {
        let digits = self.data.first().map(XScalar::digits).unwrap_or(crate::hiprec::DEFAULT_DIGITS);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(XScalar::zero(digits), |m, v| if v > m { v } else { m })
    }

    /// Product of two upper-triangular matrices, skipping structural zeros.
    pub fn mul_upper(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "mul_upper",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let digits = self.data.first().map(XScalar::digits).unwrap_or(crate::hiprec::DEFAULT_DIGITS);
        Ok(XMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = XScalar::zero(digits);
            for k in i..=j.min(self.cols - 1) {
                if k < self.cols && !self[(i, k)].is_zero() && !other[(k, j)].is_zero() {
                    acc = acc + &self[(i, k)] * &other[(k, j)];
                }
            }
            acc
        }))
    }

    /// Dense product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "mul",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let digits = self.data.first().map(XScalar::digits).unwrap_or(crate::hiprec::DEFAULT_DIGITS);
        Ok(XMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = XScalar::zero(digits);
            for k in 0..self.cols {
                acc = acc + &self[(i, k)] * &other[(k, j)];
            }
            acc
        }))
    }
}

impl Index<(usize, usize)> for XMatrix {
    type Output = XScalar;
    fn index(&self, (i, j): (usize, usize)) -> &XScalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for XMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut XScalar {
        &mut self.data[i * self.cols + j]
    }
}

/// Inverse of a unit upper-triangular matrix by column back-substitution.
pub fn unit_upper_inverse_hp(s: &XMatrix) -> Result<XMatrix> {
    if s.rows != s.cols {
        return Err(Error::NotSquare { rows: s.rows, cols: s.cols });
    }
    let n = s.rows;
    for i in 0..n {
        let d = &s[(i, i)];
        if *d != XScalar::one(d.digits()) {
            return Err(Error::NonUnitDiagonal { index: i });
        }
    }
    let digits = s.data.first().map(XScalar::digits).unwrap_or(crate::hiprec::DEFAULT_DIGITS);
    let mut inv = XMatrix::identity(n, digits);
    // column j of the inverse: x_i = -sum_{k=i+1..=j} s_ik x_k
    for j in 0..n {
        for i in (0..j).rev() {
            let mut acc = XScalar::zero(digits);
            for k in i + 1..=j {
                if !s[(i, k)].is_zero() {
                    acc = acc + &s[(i, k)] * &inv[(k, j)];
                }
            }
            inv[(i, j)] = -acc;
        }
    }
    Ok(inv)
}

//! Dense complex vectors and matrices.
//!
//! Everything in the crate (weights, signals, optical transfer operators)
//! is carried by these two types. Storage is row-major and contiguous.

use std::ops::{Deref, DerefMut, Index, IndexMut};

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        Self(data)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![ZERO; len])
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&re| Complex64::new(re, 0.0)).collect())
    }

    /// Entries `amplitude * exp(i * phase)` for each phase.
    pub fn from_polar(amplitude: f64, phases: &[f64]) -> Self {
        Self(phases.iter().map(|&p| Complex64::from_polar(amplitude, p)).collect())
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    pub fn hadamard(&self, other: &ComplexVector) -> Result<ComplexVector> {
        check_len("hadamard", self.len(), other.len())?;
        Ok(self.iter().zip(other.iter()).map(|(a, b)| a * b).collect())
    }

    pub fn conj(&self) -> ComplexVector {
        self.iter().map(|z| z.conj()).collect()
    }

    pub fn scale(&self, s: Complex64) -> ComplexVector {
        self.iter().map(|z| z * s).collect()
    }

    /// Sum of squared moduli.
    pub fn energy(&self) -> f64 {
        self.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &ComplexVector) -> f64 {
        assert_eq!(self.len(), other.len());
        self.iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Deref for ComplexVector {
    type Target = [Complex64];
    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl DerefMut for ComplexVector {
    fn deref_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }
}

impl FromIterator<Complex64> for ComplexVector {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl From<Vec<Complex64>> for ComplexVector {
    fn from(v: Vec<Complex64>) -> Self {
        Self(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        check_len("matrix data", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |r, c| if r == c { entries[r] } else { ZERO })
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

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<ComplexVector> {
        check_len("matvec", self.cols, x.len())?;
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).fold(ZERO, |acc, (w, v)| acc + w * v))
            .collect())
    }

    /// `conj(self)^T * x`, without materializing the adjoint.
    pub fn adjoint_matvec(&self, x: &[Complex64]) -> Result<ComplexVector> {
        check_len("adjoint matvec", self.rows, x.len())?;
        let mut out = vec![ZERO; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            for (o, w) in out.iter_mut().zip(self.row(r)) {
                *o += w.conj() * xr;
            }
        }
        Ok(out.into())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_len("matmul", self.cols, other.rows)?;
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> ComplexMatrix {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        self.map(|z| z * s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |U^H U - I| over entries; infinite for non-square input.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.adjoint().matmul(self).expect("square");
        gram.max_abs_diff(&ComplexMatrix::identity(self.rows))
    }

    /// Left-multiplies rows `top` and `top + 1` by the 2x2 block `m`.
    pub(crate) fn apply_rows(&mut self, top: usize, m: &[[Complex64; 2]; 2]) {
        for c in 0..self.cols {
            let a = self[(top, c)];
            let b = self[(top + 1, c)];
            self[(top, c)] = m[0][0] * a + m[0][1] * b;
            self[(top + 1, c)] = m[1][0] * a + m[1][1] * b;
        }
    }

    /// Right-multiplies columns `left` and `left + 1` by the 2x2 block `m`.
    pub(crate) fn apply_cols(&mut self, left: usize, m: &[[Complex64; 2]; 2]) {
        for r in 0..self.rows {
            let a = self[(r, left)];
            let b = self[(r, left + 1)];
            self[(r, left)] = a * m[0][0] + b * m[1][0];
            self[(r, left + 1)] = a * m[0][1] + b * m[1][1];
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Rejects NaN/Inf entries with the given context label.
pub(crate) fn ensure_finite(context: &'static str, values: &[Complex64]) -> Result<()> {
    if values.iter().all(|z| z.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(context))
    }
}

/// `[re, im]`, the on-disk form of a complex number.
pub(crate) type Pair = [f64; 2];

pub(crate) fn to_pairs(values: &[Complex64]) -> Vec<Pair> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

pub(crate) fn from_pairs(context: &'static str, pairs: &[Pair]) -> Result<Vec<Complex64>> {
    pairs
        .iter()
        .map(|&[re, im]| {
            if re.is_finite() && im.is_finite() {
                Ok(Complex64::new(re, im))
            } else {
                Err(Error::NonFinite(context))
            }
        })
        .collect()
}

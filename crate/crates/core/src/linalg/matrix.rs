//! Dense row-major complex matrices.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{FpError, Result};
use crate::scalar::{Real, C};

/// Dense complex matrix stored row-major. A `d × 1` matrix doubles as a column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, T::one())
    }

    pub fn scaled_identity(n: usize, s: T) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C::new(s, T::zero());
        }
        m
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * n + i] = C::new(v, T::zero());
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(FpError::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FpError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Column vector from entries.
    pub fn column(entries: Vec<C<T>>) -> Self {
        let rows = entries.len();
        Self {
            rows,
            cols: 1,
            data: entries,
        }
    }

    /// Column vector from real entries.
    pub fn column_real(entries: &[T]) -> Self {
        Self::column(entries.iter().map(|&v| C::new(v, T::zero())).collect())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.is_zero())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let (n, k, m) = (self.rows, self.cols, rhs.cols);
        let mut out = Self::zeros(n, m);
        for i in 0..n {
            let orow = &mut out.data[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a.is_zero() {
                    continue;
                }
                let rrow = &rhs.data[p * m..(p + 1) * m];
                for (o, &r) in orow.iter_mut().zip(rrow) {
                    *o += a * r;
                }
            }
        }
        out
    }

    /// `selfᴴ · rhs` without materializing the adjoint.
    pub fn adj_mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "adj_mul dimension mismatch");
        let (k, n, m) = (self.rows, self.cols, rhs.cols);
        let mut out = Self::zeros(n, m);
        for p in 0..k {
            let arow = &self.data[p * n..(p + 1) * n];
            let rrow = &rhs.data[p * m..(p + 1) * m];
            for (i, a) in arow.iter().enumerate() {
                let a = a.conj();
                if a.is_zero() {
                    continue;
                }
                let orow = &mut out.data[i * m..(i + 1) * m];
                for (o, &r) in orow.iter_mut().zip(rrow) {
                    *o += a * r;
                }
            }
        }
        out
    }

    /// `self · rhsᴴ`.
    pub fn mul_adj(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols, "mul_adj dimension mismatch");
        let (n, k, m) = (self.rows, self.cols, rhs.rows);
        let mut out = Self::zeros(n, m);
        for i in 0..n {
            let arow = &self.data[i * k..(i + 1) * k];
            for j in 0..m {
                let brow = &rhs.data[j * k..(j + 1) * k];
                let mut acc = C::zero();
                for (a, b) in arow.iter().zip(brow) {
                    acc += *a * b.conj();
                }
                out.data[i * m + j] = acc;
            }
        }
        out
    }

    /// Accumulates `scale · w wᴴ` into `self` (Hermitian rank-m update).
    pub fn add_gram(&mut self, w: &Self, scale: T) {
        assert!(self.is_square() && self.rows == w.rows, "add_gram dimension mismatch");
        let n = self.rows;
        let m = w.cols;
        for i in 0..n {
            let wi = &w.data[i * m..(i + 1) * m];
            for j in 0..=i {
                let wj = &w.data[j * m..(j + 1) * m];
                let mut acc = C::zero();
                for (a, b) in wi.iter().zip(wj) {
                    acc += *a * b.conj();
                }
                let acc = acc.scale(scale);
                self.data[i * n + j] += acc;
                if i != j {
                    self.data[j * n + i] += acc.conj();
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-T::one(), rhs);
        out
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        assert_eq!(self.shape(), rhs.shape(), "add dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }

    /// `self += alpha · rhs`.
    pub fn axpy(&mut self, alpha: T, rhs: &Self) {
        assert_eq!(self.shape(), rhs.shape(), "axpy dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b.scale(alpha);
        }
    }

    /// `self += alpha · rhs` with complex alpha.
    pub fn caxpy(&mut self, alpha: C<T>, rhs: &Self) {
        assert_eq!(self.shape(), rhs.shape(), "axpy dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.scale(s)).collect(),
        }
    }

    pub fn scale_mut(&mut self, s: T) {
        for z in &mut self.data {
            *z = z.scale(s);
        }
    }

    pub fn cscale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    /// Adds `s` to every diagonal entry.
    pub fn add_diag(&mut self, s: T) {
        assert!(self.is_square());
        let n = self.rows;
        for i in 0..n {
            self.data[i * n + i].re += s;
        }
    }

    pub fn trace(&self) -> C<T> {
        assert!(self.is_square());
        let n = self.rows;
        (0..n).fold(C::zero(), |acc, i| acc + self.data[i * n + i])
    }

    /// Squared Frobenius norm.
    pub fn norm_sq(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn frobenius(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// Frobenius inner product `tr(selfᴴ · rhs)`.
    pub fn inner(&self, rhs: &Self) -> C<T> {
        assert_eq!(self.shape(), rhs.shape(), "inner dimension mismatch");
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(C::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        assert_eq!(self.shape(), rhs.shape());
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, a| acc.max(a.norm()))
    }

    /// Relative deviation from Hermitian symmetry, `‖M − Mᴴ‖_max / max(1, ‖M‖_max)`.
    pub fn hermitian_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let n = self.rows;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..=i {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / T::one().max(self.max_abs())
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Entries converted to another real field.
    pub fn cast<U: Real>(&self) -> CMat<U> {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy())))
                .collect(),
        }
    }

    pub fn one_hot(rows: usize, cols: usize, i: usize, j: usize, v: C<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = v;
        m
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::one(); rows * cols],
        }
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Wire form: `{"rows": r, "cols": c, "data": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct CMatWire<T> {
    rows: usize,
    cols: usize,
    data: Vec<[T; 2]>,
}

impl<T: Real> Serialize for CMat<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CMatWire {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for CMat<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = CMatWire::<T>::deserialize(d)?;
        let data = w.data.into_iter().map(|[re, im]| C::new(re, im)).collect();
        CMat::from_vec(w.rows, w.cols, data).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn products_agree_with_explicit_adjoint() {
        let a = CMat::from_fn(3, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        let b = CMat::from_fn(3, 4, |i, j| c(j as f64 * 0.3, i as f64));
        let direct = a.adjoint().matmul(&b);
        assert!(a.adj_mul(&b).max_abs_diff(&direct) < 1e-14);
        let e = CMat::from_fn(4, 2, |i, j| c(1.0 / (1.0 + i as f64), j as f64));
        assert!(a.mul_adj(&e).max_abs_diff(&a.matmul(&e.adjoint())) < 1e-14);
    }

    #[test]
    fn gram_update_is_hermitian() {
        let w = CMat::from_fn(3, 2, |i, j| c(i as f64 - j as f64, 0.5 * (i + j) as f64));
        let mut g = CMat::zeros(3, 3);
        g.add_gram(&w, 2.0);
        let direct = w.mul_adj(&w).scale(2.0);
        assert!(g.max_abs_diff(&direct) < 1e-14);
        assert_eq!(g.hermitian_defect(), 0.0);
    }

    #[test]
    fn rejects_non_finite_and_bad_length() {
        assert!(CMat::<f64>::from_vec(2, 2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(CMat::from_vec(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn serde_round_trip_is_exact() {
        let m = CMat::from_fn(2, 3, |i, j| c(0.1 * i as f64 + 1e-300, std::f64::consts::PI * j as f64));
        let s = serde_json::to_string(&m).unwrap();
        let back: CMat<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}

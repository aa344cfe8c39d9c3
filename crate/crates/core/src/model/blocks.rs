use serde::{Deserialize, Serialize};

use crate::linalg::CMat;
use crate::scalar::Real;

/// An ordered collection of matrix blocks (one per variable or auxiliary slot).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Real")]
pub struct Blocks<T>(pub Vec<CMat<T>>);

/// Primal variables `X_1, …, X_n`.
pub type Iterate<T> = Blocks<T>;
/// Quadratic-transform auxiliaries `Y_i`, one per ratio.
pub type AuxY<T> = Blocks<T>;
/// Nonhomogeneous-bound anchors `Z_i`, one per block.
pub type AuxZ<T> = Blocks<T>;

impl<T: Real> Blocks<T> {
    pub fn new(blocks: Vec<CMat<T>>) -> Self {
        Self(blocks)
    }

    pub fn zeros(shapes: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self(shapes.into_iter().map(|(r, c)| CMat::zeros(r, c)).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CMat<T>> {
        self.0.iter()
    }

    pub fn norm_sq(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, b| acc + b.norm_sq())
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// `self + alpha · other`.
    pub fn axpy(&self, alpha: T, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| {
                    let mut a = a.clone();
                    a.axpy(alpha, b);
                    a
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-T::one(), other)
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.iter().map(|b| b.scale(s)).collect())
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |acc, (a, b)| acc.max(a.max_abs_diff(b)))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(CMat::is_finite)
    }
}

impl<T> std::ops::Index<usize> for Blocks<T> {
    type Output = CMat<T>;

    fn index(&self, i: usize) -> &CMat<T> {
        &self.0[i]
    }
}

impl<T> std::ops::IndexMut<usize> for Blocks<T> {
    fn index_mut(&mut self, i: usize) -> &mut CMat<T> {
        &mut self.0[i]
    }
}

impl<T> From<Vec<CMat<T>>> for Blocks<T> {
    fn from(v: Vec<CMat<T>>) -> Self {
        Self(v)
    }
}

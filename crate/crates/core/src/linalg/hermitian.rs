//! Hermitian matrices, Cholesky factorization and spectral bounds.

use serde::{Deserialize, Serialize};

use super::matrix::CMat;
use crate::error::{FpError, Result};
use crate::scalar::{Real, C};

/// Relative tolerance used when validating Hermitian symmetry.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Square matrix equal to its conjugate transpose (possibly singular).
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian<T> {
    m: CMat<T>,
}

impl<T: Real> Hermitian<T> {
    pub fn new(m: CMat<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(FpError::Dimension(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let defect = m.hermitian_defect();
        if defect > T::lit(HERMITIAN_TOL) {
            return Err(FpError::NotHermitian(defect.to_f64_lossy()));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix that is Hermitian by construction.
    pub(crate) fn from_trusted(m: CMat<T>) -> Self {
        debug_assert!(m.hermitian_defect() <= T::lit(1e-10));
        Self { m }
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: CMat::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: CMat::identity(n) }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &CMat<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMat<T> {
        self.m
    }

    /// Real trace.
    pub fn trace(&self) -> T {
        self.m.trace().re
    }

    pub fn frobenius(&self) -> T {
        self.m.frobenius()
    }

    /// `self + s·I`.
    pub fn shifted(&self, s: T) -> Self {
        let mut m = self.m.clone();
        m.add_diag(s);
        Self { m }
    }

    pub fn factor(&self) -> Result<HermitianPd<T>> {
        HermitianPd::from_hermitian(self.clone())
    }

    /// `vᴴ M v` for a column (or summed over columns, `tr(Vᴴ M V)`).
    pub fn quad_form(&self, v: &CMat<T>) -> T {
        v.inner(&self.m.matmul(v)).re
    }
}

/// Hermitian positive-definite matrix carrying its lower Cholesky factor `L` (`M = L Lᴴ`).
#[derive(Clone, Debug)]
pub struct HermitianPd<T> {
    m: Hermitian<T>,
    chol: CMat<T>,
}

impl<T: Real> HermitianPd<T> {
    pub fn new(m: CMat<T>) -> Result<Self> {
        Self::from_hermitian(Hermitian::new(m)?)
    }

    pub fn from_hermitian(m: Hermitian<T>) -> Result<Self> {
        let chol = cholesky(m.matrix())?;
        Ok(Self { m, chol })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: Hermitian::identity(n),
            chol: CMat::identity(n),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMat<T> {
        self.m.matrix()
    }

    pub fn hermitian(&self) -> &Hermitian<T> {
        &self.m
    }

    pub fn cholesky_factor(&self) -> &CMat<T> {
        &self.chol
    }

    /// Solves `M S = rhs` by forward/back substitution on the stored factor.
    pub fn solve(&self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(self.dim(), rhs.rows(), "solve dimension mismatch");
        let n = self.dim();
        let m = rhs.cols();
        let l = &self.chol;
        let mut s = rhs.clone();
        // L w = rhs
        for col in 0..m {
            for i in 0..n {
                let mut acc = s[(i, col)];
                for k in 0..i {
                    acc -= l[(i, k)] * s[(k, col)];
                }
                s[(i, col)] = acc.unscale(l[(i, i)].re);
            }
            // Lᴴ s = w
            for i in (0..n).rev() {
                let mut acc = s[(i, col)];
                for k in i + 1..n {
                    acc -= l[(k, i)].conj() * s[(k, col)];
                }
                s[(i, col)] = acc.unscale(l[(i, i)].re);
            }
        }
        s
    }

    /// `log det M`.
    pub fn log_det(&self) -> T {
        let two = T::lit(2.0);
        (0..self.dim()).fold(T::zero(), |acc, i| acc + two * self.chol[(i, i)].re.ln())
    }
}

fn cholesky<T: Real>(m: &CMat<T>) -> Result<CMat<T>> {
    let n = m.rows();
    let mut l = CMat::<T>::zeros(n, n);
    for j in 0..n {
        let mut diag = m[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if !(diag > T::zero()) || !diag.is_finite() {
            return Err(FpError::NotPositiveDefinite {
                pivot: j,
                value: diag.to_f64_lossy(),
            });
        }
        let djj = diag.sqrt();
        l[(j, j)] = C::new(djj, T::zero());
        for i in j + 1..n {
            let mut acc = m[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc.unscale(djj);
        }
    }
    Ok(l)
}

/// Solves `m · s = rhs` for Hermitian positive-definite `m`.
pub fn hermitian_solve<T: Real>(m: &HermitianPd<T>, rhs: &CMat<T>) -> Result<CMat<T>> {
    if m.dim() != rhs.rows() {
        return Err(FpError::Dimension(format!(
            "solve: matrix is {0}x{0}, rhs has {1} rows",
            m.dim(),
            rhs.rows()
        )));
    }
    Ok(m.solve(rhs))
}

/// How the admissible step constant `λ ≥ λ_max` is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralMode {
    /// Frobenius norm; always an upper bound.
    #[default]
    Frobenius,
    /// Largest eigenvalue by power iteration (Rayleigh quotient plus residual, capped by Frobenius).
    Exact,
}

pub const POWER_ITERATION_CAP: usize = 20_000;
const POWER_ITERATION_TOL: f64 = 1e-8;

/// Upper bound on the largest eigenvalue of a positive semidefinite Hermitian matrix.
pub fn spectral_upper_bound<T: Real>(m: &Hermitian<T>, mode: SpectralMode) -> Result<T> {
    let frob = m.frobenius();
    match mode {
        SpectralMode::Frobenius => Ok(frob),
        SpectralMode::Exact => {
            if frob.is_zero() {
                return Ok(T::zero());
            }
            let lam = power_iteration(m, POWER_ITERATION_CAP)?;
            Ok(lam.min(frob))
        }
    }
}

fn power_iteration<T: Real>(m: &Hermitian<T>, cap: usize) -> Result<T> {
    let n = m.dim();
    // Deterministic start with no special alignment to any eigenvector.
    let mut v = CMat::column(
        (0..n)
            .map(|k| {
                let t = T::from_usize_lossy(k + 1);
                C::new(T::one() + (t * T::lit(0.754_877_666)).sin() * T::lit(0.5), (t * T::lit(0.569_840_29)).cos() * T::lit(0.25))
            })
            .collect(),
    );
    let nv = v.frobenius();
    v.scale_mut(nv.recip());
    let tol = T::lit(POWER_ITERATION_TOL);
    for _ in 0..cap {
        let w = m.matrix().matmul(&v);
        let rq = v.inner(&w).re;
        let mut r = w.clone();
        r.axpy(-rq, &v);
        let res = r.frobenius();
        let wn = w.frobenius();
        if wn.is_zero() {
            return Ok(T::zero());
        }
        // A residual below tol·rq pins an eigenvalue within that distance of rq.
        if res <= tol * rq.abs() {
            return Ok(rq + res);
        }
        v = w.scale(wn.recip());
    }
    Err(FpError::NonConvergent(cap))
}

//! Seeded random instances and starting points.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::blocks::Iterate;
use super::problem::RatioProblem;
use crate::error::{FpError, Result};
use crate::linalg::{CMat, ConstraintSpec};
use crate::scalar::{Real, C};

/// The deterministic generator used everywhere a seed is accepted.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One draw from `CN(0, 1)`.
pub fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(T::lit(re * s), T::lit(im * s))
}

/// Matrix with i.i.d. `CN(0, 1)` entries.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat<T> {
    CMat::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Shape and scaling of a dense random instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceParams {
    pub n: usize,
    pub d: usize,
    pub ell: usize,
    pub m: usize,
    pub radius_sq: Option<f64>,
    pub regularizer: f64,
    pub weight: f64,
}

impl Default for InstanceParams {
    /// Five matrix ratios, 9×4 variables, 4-row coefficients, power 10, identity added to every denominator.
    fn default() -> Self {
        Self {
            n: 5,
            d: 9,
            ell: 4,
            m: 4,
            radius_sq: Some(10.0),
            regularizer: 1.0,
            weight: 1.0,
        }
    }
}

impl InstanceParams {
    pub fn vector(n: usize, d: usize, ell: usize) -> Self {
        Self {
            n,
            d,
            ell,
            m: 1,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 || self.ell == 0 || self.m == 0 {
            return Err(FpError::InvalidParams("instance dimensions must be positive".into()));
        }
        if !(self.regularizer > 0.0) {
            return Err(FpError::InvalidParams("dense random denominators need a positive regularizer".into()));
        }
        if !(self.weight > 0.0) {
            return Err(FpError::InvalidParams("weights must be positive".into()));
        }
        if matches!(self.radius_sq, Some(r) if !(r > 0.0)) {
            return Err(FpError::InvalidParams("radius² must be positive".into()));
        }
        Ok(())
    }
}

/// Dense instance with all `A_i`, `B_ij` drawn i.i.d. `CN(0, 1)`.
pub fn random_problem<T: Real, R: Rng + ?Sized>(params: &InstanceParams, rng: &mut R) -> Result<RatioProblem<T>> {
    params.validate()?;
    let InstanceParams { n, d, ell, m, .. } = *params;
    let numerators = (0..n).map(|_| complex_gaussian(rng, ell, d)).collect();
    let cross = (0..n)
        .map(|_| (0..n).map(|_| complex_gaussian(rng, ell, d)).collect())
        .collect();
    let spec = match params.radius_sq {
        Some(r) => ConstraintSpec::Ball { radius_sq: T::lit(r) },
        None => ConstraintSpec::Unconstrained,
    };
    RatioProblem::dense(
        numerators,
        cross,
        m,
        vec![T::lit(params.weight); n],
        T::lit(params.regularizer),
        vec![spec; n],
    )
}

/// Gaussian draw projected onto the feasible set.
pub fn random_start<T: Real, R: Rng + ?Sized>(p: &RatioProblem<T>, rng: &mut R) -> Iterate<T> {
    let raw = Iterate::new(p.block_shapes().map(|(r, c)| complex_gaussian(rng, r, c)).collect());
    p.project(&raw)
}

//! Quadratic-transform solvers for sums of weighted matrix ratios and for logarithmic
//! (weighted sum-rate) fractional programs, with scenario builders for two wireless
//! precoding problems.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases below fix `f64`,
//! which is what the benchmark tooling uses.

pub mod error;
pub mod linalg;
pub mod logfp;
pub mod model;
pub mod wireless;
pub mod solvers;
pub mod scalar;

#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use error::{FpError, Result};
pub use scalar::{Real, C};

pub type CMatrix = linalg::CMat<f64>;
pub type HermitianMatrix = linalg::Hermitian<f64>;
pub type HermitianPdMatrix = linalg::HermitianPd<f64>;
pub type Constraint = linalg::ConstraintSpec<f64>;
pub type Problem = model::RatioProblem<f64>;
pub type Point = model::Iterate<f64>;

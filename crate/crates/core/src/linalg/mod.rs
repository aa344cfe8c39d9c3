//! Complex dense linear algebra, projections and the power-constraint multiplier search.

pub mod bisection;
pub mod hermitian;
pub mod matrix;
pub mod projection;

pub use bisection::{
    regularized_inverse_bisection, regularized_inverse_bisection_group, BisectionOutcome,
    DEFAULT_BISECTION_TOL,
};
pub use hermitian::{hermitian_solve, spectral_upper_bound, Hermitian, HermitianPd, SpectralMode};
pub use matrix::CMat;
pub use projection::{
    constraint_groups, project_all, project_ball, project_group_ball, ConstraintGroup,
    ConstraintSpec,
};

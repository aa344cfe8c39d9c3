//! Iterative solvers for [`RatioProblem`](crate::model::RatioProblem): the conventional,
//! nonhomogeneous and extrapolated quadratic-transform methods plus two gradient baselines.

mod options;
mod run;
mod steps;
mod trace;

pub use options::{Schedule, SolverId, SolverOptions};
pub use run::{momentum_weight, run};
pub use steps::{
    extrapolate, extrapolation_ratio, extrapolation_step, step_constants, step_conventional, step_extrapolated,
    step_extrapolated_with, step_gradient_baseline, step_nonhomogeneous, step_polyak,
};
pub(crate) use steps::conventional_solve;
pub use trace::{read_csv, write_csv, ConvergenceTrace, Termination, TraceRecord};
pub(crate) use trace::drive;

#[cfg(test)]
mod tests;

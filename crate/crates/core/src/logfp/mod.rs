//! Weighted sum-of-log-ratios problems `max Σ μ_i log(1 + M_i(x))`, solved through the
//! Lagrangian dual transform followed by one quadratic-transform iteration per round.

mod problem;
mod steps;

pub use problem::{dual_transform_surrogate, log_objective, optimal_t, random_interference, AuxT, LogFpProblem};
pub use steps::{run_log, step_generalized, step_wmmse_classic, Inner, Momentum};

//! The sum-of-weighted-ratios model: problem data, evaluation and surrogates.

mod blocks;
mod eval;
mod problem;
pub mod random;

pub use blocks::{AuxY, AuxZ, Blocks, Iterate};
pub use eval::{
    denominator, denominator_matrix, dmat, dmats, evaluate, f_q, f_q_gap, f_t, gradient,
    numerator_targets, objective, optimal_y, ratio_value, Evaluation,
};
pub(crate) use eval::gradient_with_y;
pub use problem::{DenomTerm, Ratio, RatioProblem};

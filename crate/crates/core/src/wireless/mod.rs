//! Scenario builders: a two-cell sensing-and-communication setup and a multi-cell
//! MIMO downlink, each compiled into the generic problem types.

pub mod geometry;
pub mod isac;
pub mod mimo;
#[cfg(test)]
mod tests;

pub use geometry::{
    broadside_angle, db_to_linear, dbm_to_watts, isac_path_loss_db, mimo_path_loss_db, steering_derivative,
    steering_matrix, steering_vector, steering_vector_derivative, HexLayout,
};
pub use isac::{
    compile_isac, fisher_information, isac_objective, isac_sinr, isac_step_conventional, isac_step_nonhomogeneous,
    solve_isac, IsacParams, IsacScenario,
};
pub use mimo::{compile_mimo, mimo_sinr, mimo_sum_rate, solve_mimo, MimoNetwork, MimoParams};

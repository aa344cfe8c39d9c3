//! Benchmark harness around the `fracopt` solvers: experiment sweeps, aggregates,
//! empirical convergence rates and the invariant suites behind `fracopt verify`.

pub mod aggregate;
pub mod config;
pub mod error;
pub mod experiments;
pub mod rates;
pub mod seeds;
pub mod verify;

pub use config::{parse_solvers, Experiment, RunConfig};
pub use error::BenchError;
pub use experiments::{run_experiment, ExperimentReport, RunResult, RunSummary};
pub use rates::{cmd_rates, fit_rate, FStar, RateFit};
pub use verify::{cmd_verify, SuiteReport, SuiteSizes};

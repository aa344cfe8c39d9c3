use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FpError, Result};
use crate::linalg::{SpectralMode, DEFAULT_BISECTION_TOL};

/// Momentum schedule used by the extrapolated solvers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// `η_k = max{(k − 2)/(k + 1), 0}`.
    #[default]
    Nesterov,
    /// `η_k = 0`: the extrapolated solver degenerates to its base method.
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Stop once `|f_k − f_{k−1}| / max(|f_k|, 1)` falls below this.
    pub rel_obj_tol: f64,
    pub lambda_mode: SpectralMode,
    pub record_wall_time: bool,
    pub seed: u64,
    /// Relative slack accepted by the power-constraint multiplier search.
    pub bisection_tol: f64,
    pub schedule: Schedule,
    /// Append the per-ratio auxiliary `t_i` to every trace record (log-FP solvers).
    pub record_t: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            rel_obj_tol: 1e-8,
            lambda_mode: SpectralMode::Frobenius,
            record_wall_time: true,
            seed: 0,
            bisection_tol: DEFAULT_BISECTION_TOL,
            schedule: Schedule::Nesterov,
            record_t: false,
        }
    }
}

impl SolverOptions {
    pub fn with_iters(max_iters: usize, rel_obj_tol: f64) -> Self {
        Self {
            max_iters,
            rel_obj_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(FpError::InvalidOptions("max_iters must be at least 1".into()));
        }
        if !(self.rel_obj_tol > 0.0) {
            return Err(FpError::InvalidOptions("rel_obj_tol must be positive".into()));
        }
        if !(self.bisection_tol > 0.0) {
            return Err(FpError::InvalidOptions("bisection_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Every iterative method the crate provides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverId {
    /// Closed-form (matrix-inverse) quadratic-transform update.
    Conventional,
    /// Inverse-free update: one projected gradient step with step `1/(2λ)`.
    Nonhomogeneous,
    /// Nonhomogeneous update at a Nesterov-extrapolated point.
    Extrapolated,
    /// Projected gradient ascent with step `1/k`.
    Gradient,
    /// Nonhomogeneous update followed by heavy-ball momentum.
    Polyak,
    /// Weighted MMSE iteration for log-FP problems.
    WmmseClassic,
    GeneralizedConventional,
    GeneralizedNonhomogeneous,
    GeneralizedExtrapolated,
}

impl SolverId {
    pub const RATIO_SOLVERS: [SolverId; 5] = [
        SolverId::Conventional,
        SolverId::Nonhomogeneous,
        SolverId::Extrapolated,
        SolverId::Gradient,
        SolverId::Polyak,
    ];

    pub const LOG_SOLVERS: [SolverId; 4] = [
        SolverId::WmmseClassic,
        SolverId::GeneralizedConventional,
        SolverId::GeneralizedNonhomogeneous,
        SolverId::GeneralizedExtrapolated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Conventional => "conventional",
            Self::Nonhomogeneous => "nonhomogeneous",
            Self::Extrapolated => "extrapolated",
            Self::Gradient => "gradient",
            Self::Polyak => "polyak",
            Self::WmmseClassic => "wmmse_classic",
            Self::GeneralizedConventional => "generalized_conventional",
            Self::GeneralizedNonhomogeneous => "generalized_nonhomogeneous",
            Self::GeneralizedExtrapolated => "generalized_extrapolated",
        }
    }

    pub fn is_log_solver(self) -> bool {
        Self::LOG_SOLVERS.contains(&self)
    }

    /// Whether the method is guaranteed to increase the objective monotonically.
    pub fn is_monotone(self) -> bool {
        matches!(
            self,
            Self::Conventional
                | Self::Nonhomogeneous
                | Self::WmmseClassic
                | Self::GeneralizedConventional
                | Self::GeneralizedNonhomogeneous
        )
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverId {
    type Err = FpError;

    fn from_str(s: &str) -> Result<Self> {
        let id = match s.trim().to_ascii_lowercase().as_str() {
            "conventional" | "alg1" => Self::Conventional,
            "nonhomogeneous" | "alg2" => Self::Nonhomogeneous,
            "extrapolated" | "alg3" => Self::Extrapolated,
            "gradient" => Self::Gradient,
            "polyak" => Self::Polyak,
            "wmmse_classic" | "wmmse" => Self::WmmseClassic,
            "generalized_conventional" => Self::GeneralizedConventional,
            "generalized_nonhomogeneous" => Self::GeneralizedNonhomogeneous,
            "generalized_extrapolated" => Self::GeneralizedExtrapolated,
            other => return Err(FpError::InvalidOptions(format!("unknown solver id `{other}`"))),
        };
        Ok(id)
    }
}

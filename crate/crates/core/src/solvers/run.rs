use super::options::{Schedule, SolverId, SolverOptions};
use super::steps::{
    conventional_from_y, extrapolate, extrapolation_step, gradient_ascent, nonhomogeneous_from_y, polyak_momentum,
};
use super::trace::{drive, ConvergenceTrace};
use crate::error::{FpError, Result};
use crate::model::{self, Iterate, RatioProblem};
use crate::scalar::Real;

/// Momentum weight applied when producing iterate `k` (the first two are plain steps).
pub fn momentum_weight<T: Real>(schedule: Schedule, k: usize) -> T {
    match schedule {
        Schedule::Nesterov => extrapolation_step(k.saturating_sub(1).max(1)),
        Schedule::Zero => T::zero(),
    }
}

/// Runs a ratio solver from `x0` (projected onto the feasible set first).
pub fn run<T: Real>(p: &RatioProblem<T>, x0: &Iterate<T>, id: SolverId, opts: &SolverOptions) -> Result<ConvergenceTrace<T>> {
    opts.validate()?;
    if id.is_log_solver() {
        return Err(FpError::InvalidOptions(format!("{id} needs a log-FP problem")));
    }
    p.check_iterate(x0)?;
    let tol = T::lit(opts.bisection_tol);
    let mode = opts.lambda_mode;

    let mut x = p.project(x0);
    let mut x_prev = x.clone();
    let mut ev = model::evaluate(p, &x)?;
    let f0 = ev.objective.to_f64_lossy();

    let (records, termination) = drive(opts, f0, |k| {
        let next = match id {
            SolverId::Conventional => conventional_from_y(p, &ev.y, tol)?,
            SolverId::Nonhomogeneous => nonhomogeneous_from_y(p, &x, &ev.y, mode)?,
            SolverId::Extrapolated => {
                let eta: T = momentum_weight(opts.schedule, k);
                if eta == T::zero() {
                    nonhomogeneous_from_y(p, &x, &ev.y, mode)?
                } else {
                    let nu = extrapolate(&x_prev, &x, eta);
                    let y = model::optimal_y(p, &nu)?;
                    nonhomogeneous_from_y(p, &nu, &y, mode)?
                }
            }
            SolverId::Gradient => {
                let g = model::gradient_with_y(p, &x, &ev.y);
                gradient_ascent(p, &x, &g, T::from_usize_lossy(k).recip())
            }
            SolverId::Polyak => {
                let g = nonhomogeneous_from_y(p, &x, &ev.y, mode)?;
                polyak_momentum(p, &g, &x_prev, &x, momentum_weight(opts.schedule, k))
            }
            _ => unreachable!("log solvers rejected above"),
        };
        ev = model::evaluate(p, &next)?;
        x_prev = std::mem::replace(&mut x, next);
        Ok((ev.objective.to_f64_lossy(), Vec::new()))
    })?;

    Ok(ConvergenceTrace {
        solver: id,
        seed: opts.seed,
        initial_objective: f0,
        records,
        final_iterate: x,
        termination,
    })
}

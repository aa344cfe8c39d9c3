use super::problem::{log_value, optimal_t, LogFpProblem};
use crate::error::{FpError, Result};
use crate::linalg::{CMat, Hermitian};
use crate::model::{Blocks, Iterate};
use crate::scalar::Real;
use crate::solvers::{
    conventional_solve, drive, extrapolate, momentum_weight, step_conventional, step_nonhomogeneous,
    ConvergenceTrace, SolverId, SolverOptions,
};
use crate::linalg::SpectralMode;

/// Which quadratic-transform iteration is applied to the weighted companion problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inner {
    Conventional,
    Nonhomogeneous,
    Extrapolated,
}

/// Previous iterate and momentum weight for [`Inner::Extrapolated`].
#[derive(Clone, Copy, Debug)]
pub struct Momentum<'a, T> {
    pub prev: &'a Iterate<T>,
    pub weight: T,
}

/// One round of the generalized method: `t ← M(x)`, then a single inner iteration on
/// `Σ μ_i (1 + t_i) M̂_i`. With [`Inner::Extrapolated`] both happen at the extrapolated point.
pub fn step_generalized<T: Real>(
    p: &LogFpProblem<T>,
    x: &Iterate<T>,
    inner: Inner,
    momentum: Option<Momentum<'_, T>>,
    mode: SpectralMode,
    bisection_tol: T,
) -> Result<Iterate<T>> {
    let anchor = match (inner, momentum) {
        (Inner::Extrapolated, Some(m)) if m.weight != T::zero() => extrapolate(m.prev, x, m.weight),
        (Inner::Extrapolated, None) => {
            return Err(FpError::InvalidOptions("extrapolated inner step needs momentum".into()));
        }
        _ => x.clone(),
    };
    let t = optimal_t(p, &anchor)?;
    generalized_from_t(p, &anchor, &t, inner, mode, bisection_tol)
}

pub(crate) fn generalized_from_t<T: Real>(
    p: &LogFpProblem<T>,
    anchor: &Iterate<T>,
    t: &[T],
    inner: Inner,
    mode: SpectralMode,
    bisection_tol: T,
) -> Result<Iterate<T>> {
    let weighted = p.weighted_hat(t)?;
    match inner {
        Inner::Conventional => step_conventional(&weighted, anchor, bisection_tol),
        Inner::Nonhomogeneous | Inner::Extrapolated => step_nonhomogeneous(&weighted, anchor, mode),
    }
}

/// Weighted MMSE iteration written out directly: SINRs, MMSE-type receivers `ŷ_i`,
/// the weighted covariance `D̂` and a multiplier search per power budget.
pub fn step_wmmse_classic<T: Real>(p: &LogFpProblem<T>, x: &Iterate<T>, bisection_tol: T) -> Result<Iterate<T>> {
    let base = p.base();
    base.check_iterate(x)?;
    let nb = base.num_blocks();
    let mut dhat: Vec<CMat<T>> = base.block_rows().iter().map(|&d| CMat::zeros(d, d)).collect();
    let mut target: Vec<CMat<T>> = base.block_rows().iter().map(|&d| CMat::zeros(d, 1)).collect();
    for (i, r) in base.ratios().iter().enumerate() {
        let signal = r.numerator.matmul(&x[r.block]);
        let mut interference = CMat::scaled_identity(r.dim(), r.regularizer);
        for term in &r.terms {
            interference.add_gram(&term.coeff.matmul(&x[term.block]), T::one());
        }
        let sinr = signal.inner(&Hermitian::new(interference.clone())?.factor()?.solve(&signal)).re;
        let mut received = interference;
        received.add_gram(&signal, T::one());
        let receiver = Hermitian::new(received)?.factor()?.solve(&signal);
        let w = p.mu()[i] * (T::one() + sinr);
        target[r.block].axpy(w, &r.numerator.adj_mul(&receiver));
        for term in r.terms.iter().map(|t| (t.block, &t.coeff)).chain(std::iter::once((r.block, &r.numerator))) {
            dhat[term.0].add_gram(&term.1.adj_mul(&receiver), w);
        }
    }
    let ds: Vec<Hermitian<T>> = dhat.into_iter().map(Hermitian::new).collect::<Result<_>>()?;
    debug_assert_eq!(ds.len(), nb);
    conventional_solve(base.groups(), &ds, &Blocks(target), bisection_tol)
}

/// Runs a log-FP solver from `x0` (projected first); trace objective is `Σ μ_i log(1 + M_i)`.
pub fn run_log<T: Real>(
    p: &LogFpProblem<T>,
    x0: &Iterate<T>,
    id: SolverId,
    opts: &SolverOptions,
) -> Result<ConvergenceTrace<T>> {
    opts.validate()?;
    if !id.is_log_solver() {
        return Err(FpError::InvalidOptions(format!("{id} is not a log-FP solver")));
    }
    p.base().check_iterate(x0)?;
    let tol = T::lit(opts.bisection_tol);
    let mode = opts.lambda_mode;
    let mut x = p.base().project(x0);
    let mut x_prev = x.clone();
    let mut t = optimal_t(p, &x)?;
    let f0 = log_value(p.mu(), &t).to_f64_lossy();

    let (records, termination) = drive(opts, f0, |k| {
        let next = match id {
            SolverId::WmmseClassic => step_wmmse_classic(p, &x, tol)?,
            SolverId::GeneralizedConventional => generalized_from_t(p, &x, &t, Inner::Conventional, mode, tol)?,
            SolverId::GeneralizedNonhomogeneous => generalized_from_t(p, &x, &t, Inner::Nonhomogeneous, mode, tol)?,
            SolverId::GeneralizedExtrapolated => {
                let m = Momentum {
                    prev: &x_prev,
                    weight: momentum_weight(opts.schedule, k),
                };
                step_generalized(p, &x, Inner::Extrapolated, Some(m), mode, tol)?
            }
            _ => unreachable!("ratio solvers rejected above"),
        };
        t = optimal_t(p, &next)?;
        let f = log_value(p.mu(), &t).to_f64_lossy();
        x_prev = std::mem::replace(&mut x, next);
        let extra = if opts.record_t {
            t.iter().map(|v| v.to_f64_lossy()).collect()
        } else {
            Vec::new()
        };
        Ok((f, extra))
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

//! Single iterations of the ratio solvers.

use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::error::Result;
use crate::linalg::{
    project_all, regularized_inverse_bisection_group, spectral_upper_bound, CMat, ConstraintGroup, Hermitian,
    SpectralMode,
};
use crate::model::{self, Blocks, Iterate, RatioProblem};
use crate::scalar::Real;

/// Extrapolation weight `max{(k − 2)/(k + 1), 0}` as an exact fraction.
pub fn extrapolation_ratio(k: u64) -> Ratio<u64> {
    assert!(k >= 1, "extrapolation index starts at 1");
    if k <= 2 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(k - 2, k + 1)
    }
}

/// [`extrapolation_ratio`] rounded once to the working precision.
pub fn extrapolation_step<T: Real>(k: usize) -> T {
    let r = extrapolation_ratio(k as u64);
    T::lit(r.to_f64().expect("finite ratio"))
}

/// `D + εI` with `ε = 1e-12 · tr(D)/dim`, floored at the smallest positive value.
pub(crate) fn jittered<T: Real>(d: &Hermitian<T>) -> Hermitian<T> {
    let eps = (T::lit(1e-12) * d.trace() / T::from_usize_lossy(d.dim())).max(T::min_positive_value());
    d.shifted(eps)
}

/// Block update of the conventional method given `D_b` and `c_b`:
/// `argmax 2Re tr(X_bᴴ c_b) − tr(X_bᴴ D_b X_b)` over each constraint group.
pub(crate) fn conventional_solve<T: Real>(
    groups: &[ConstraintGroup<T>],
    ds: &[Hermitian<T>],
    cs: &Blocks<T>,
    bisection_tol: T,
) -> Result<Iterate<T>> {
    let mut out: Vec<Option<CMat<T>>> = vec![None; cs.len()];
    for g in groups {
        match g {
            ConstraintGroup::Free(b) => {
                let f = jittered(&ds[*b]).factor()?;
                out[*b] = Some(f.solve(&cs[*b]));
            }
            ConstraintGroup::Ball { block, radius_sq } => {
                let sol = regularized_inverse_bisection_group(&[(&ds[*block], &cs[*block])], *radius_sq, bisection_tol)?;
                out[*block] = sol.solutions.into_iter().next();
            }
            ConstraintGroup::Joint { members, radius_sq } => {
                let pairs: Vec<_> = members.iter().map(|&m| (&ds[m], &cs[m])).collect();
                let sol = regularized_inverse_bisection_group(&pairs, *radius_sq, bisection_tol)?;
                for (&m, s) in members.iter().zip(sol.solutions) {
                    out[m] = Some(s);
                }
            }
        }
    }
    Ok(Blocks(out.into_iter().map(|b| b.expect("groups partition the blocks")).collect()))
}

/// Step constants `λ_b ≥ λ_max(D_b)`; blocks sharing a power budget share the largest one.
pub fn step_constants<T: Real>(groups: &[ConstraintGroup<T>], ds: &[Hermitian<T>], mode: SpectralMode) -> Result<Vec<T>> {
    let mut lams = vec![T::zero(); ds.len()];
    for g in groups {
        let members = g.members();
        let mut lam = T::zero();
        for &m in &members {
            lam = lam.max(spectral_upper_bound(&ds[m], mode)?);
        }
        for &m in &members {
            lams[m] = lam;
        }
    }
    Ok(lams)
}

/// `P(Z + (c − D Z)/λ)` blockwise.
pub(crate) fn nonhomogeneous_solve<T: Real>(
    groups: &[ConstraintGroup<T>],
    z: &Iterate<T>,
    ds: &[Hermitian<T>],
    cs: &Blocks<T>,
    lams: &[T],
) -> Iterate<T> {
    let mut out = Vec::with_capacity(z.len());
    for b in 0..z.len() {
        let mut dir = cs[b].clone();
        dir.axpy(-T::one(), &ds[b].matrix().matmul(&z[b]));
        let lam = if lams[b] > T::zero() {
            lams[b]
        } else if dir.is_zero() {
            T::one()
        } else {
            // Zero curvature but a nonzero pull: take the longest step the projection allows.
            T::epsilon() * dir.frobenius()
        };
        let mut x = z[b].clone();
        x.axpy(lam.recip(), &dir);
        out.push(x);
    }
    project_all(groups, &mut out);
    Blocks(out)
}

/// One conventional iteration from a known `Y = optimal_y(X)`.
pub(crate) fn conventional_from_y<T: Real>(p: &RatioProblem<T>, y: &Blocks<T>, bisection_tol: T) -> Result<Iterate<T>> {
    let ds = model::dmats(p, y);
    let cs = model::numerator_targets(p, y);
    conventional_solve(p.groups(), &ds, &cs, bisection_tol)
}

/// One nonhomogeneous iteration anchored at `z` with `Y = optimal_y(z)`.
pub(crate) fn nonhomogeneous_from_y<T: Real>(
    p: &RatioProblem<T>,
    z: &Iterate<T>,
    y: &Blocks<T>,
    mode: SpectralMode,
) -> Result<Iterate<T>> {
    let ds = model::dmats(p, y);
    let cs = model::numerator_targets(p, y);
    let lams = step_constants(p.groups(), &ds, mode)?;
    Ok(nonhomogeneous_solve(p.groups(), z, &ds, &cs, &lams))
}

/// Conventional quadratic-transform iteration: optimal `Y`, then the exact block maximizer.
pub fn step_conventional<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>, bisection_tol: T) -> Result<Iterate<T>> {
    let y = model::optimal_y(p, x)?;
    conventional_from_y(p, &y, bisection_tol)
}

/// Nonhomogeneous iteration: `Z = X`, optimal `Y`, then `X' = P(Z + (c − DZ)/λ)`.
pub fn step_nonhomogeneous<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>, mode: SpectralMode) -> Result<Iterate<T>> {
    let y = model::optimal_y(p, x)?;
    nonhomogeneous_from_y(p, x, &y, mode)
}

/// `x_curr + eta (x_curr − x_prev)`.
pub fn extrapolate<T: Real>(x_prev: &Iterate<T>, x_curr: &Iterate<T>, eta: T) -> Iterate<T> {
    x_curr.axpy(eta, &x_curr.sub(x_prev))
}

/// Nonhomogeneous iteration at the extrapolated point with weight `extrapolation_step(k)`.
pub fn step_extrapolated<T: Real>(
    p: &RatioProblem<T>,
    x_prev: &Iterate<T>,
    x_curr: &Iterate<T>,
    k: usize,
    mode: SpectralMode,
) -> Result<Iterate<T>> {
    step_extrapolated_with(p, x_prev, x_curr, extrapolation_step(k), mode)
}

/// Nonhomogeneous iteration at `x_curr + eta (x_curr − x_prev)`; the anchor may be infeasible.
pub fn step_extrapolated_with<T: Real>(
    p: &RatioProblem<T>,
    x_prev: &Iterate<T>,
    x_curr: &Iterate<T>,
    eta: T,
    mode: SpectralMode,
) -> Result<Iterate<T>> {
    let nu = extrapolate(x_prev, x_curr, eta);
    step_nonhomogeneous(p, &nu, mode)
}

/// Projected gradient ascent with step `1/k` along the conjugate-coordinate gradient.
pub fn step_gradient_baseline<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>, k: usize) -> Result<Iterate<T>> {
    let g = model::gradient(p, x)?;
    Ok(gradient_ascent(p, x, &g, T::from_usize_lossy(k).recip()))
}

pub(crate) fn gradient_ascent<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>, g: &Blocks<T>, step: T) -> Iterate<T> {
    p.project(&x.axpy(step, g))
}

/// Heavy-ball variant: a nonhomogeneous step from `x_curr`, then momentum
/// `η_k (x_curr − x_prev)`, then a final projection.
pub fn step_polyak<T: Real>(
    p: &RatioProblem<T>,
    x_prev: &Iterate<T>,
    x_curr: &Iterate<T>,
    k: usize,
    mode: SpectralMode,
) -> Result<Iterate<T>> {
    let g = step_nonhomogeneous(p, x_curr, mode)?;
    Ok(polyak_momentum(p, &g, x_prev, x_curr, extrapolation_step(k)))
}

pub(crate) fn polyak_momentum<T: Real>(
    p: &RatioProblem<T>,
    g: &Iterate<T>,
    x_prev: &Iterate<T>,
    x_curr: &Iterate<T>,
    eta: T,
) -> Iterate<T> {
    if eta == T::zero() {
        return g.clone();
    }
    p.project(&g.axpy(eta, &x_curr.sub(x_prev)))
}

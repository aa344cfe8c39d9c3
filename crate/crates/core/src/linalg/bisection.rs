//! Multiplier search for `max 2Re tr(Xᴴ c) − tr(Xᴴ D X)` over a (group) power ball.
//!
//! The stationary point for a multiplier `η ≥ 0` is `X(η) = (D + ηI)⁻¹ c`; its norm is
//! nonincreasing in `η`, so the smallest feasible `η` is found by bracketing and bisection.

use super::hermitian::Hermitian;
use super::matrix::CMat;
use crate::error::{FpError, Result};
use crate::scalar::Real;

pub const DEFAULT_BISECTION_TOL: f64 = 1e-10;
pub const MAX_DOUBLINGS: usize = 200;
pub const MAX_HALVINGS: usize = 60;

#[derive(Clone, Debug)]
pub struct BisectionOutcome<T> {
    pub solutions: Vec<CMat<T>>,
    pub eta: T,
}

/// Single-block form: returns `(D + ηI)⁻¹ target` with the smallest feasible `η`.
pub fn regularized_inverse_bisection<T: Real>(
    d: &Hermitian<T>,
    target: &CMat<T>,
    radius_sq: T,
    tol: T,
) -> Result<(CMat<T>, T)> {
    let out = regularized_inverse_bisection_group(&[(d, target)], radius_sq, tol)?;
    let eta = out.eta;
    Ok((out.solutions.into_iter().next().expect("one block"), eta))
}

/// Shared-multiplier form over several blocks: `Σ_b ‖(D_b + ηI)⁻¹ c_b‖² ≤ radius_sq`.
pub fn regularized_inverse_bisection_group<T: Real>(
    pairs: &[(&Hermitian<T>, &CMat<T>)],
    radius_sq: T,
    tol: T,
) -> Result<BisectionOutcome<T>> {
    for (d, c) in pairs {
        if d.dim() != c.rows() {
            return Err(FpError::Dimension(format!(
                "bisection: matrix is {0}x{0}, target has {1} rows",
                d.dim(),
                c.rows()
            )));
        }
    }
    if pairs.iter().all(|(_, c)| c.is_zero()) {
        return Ok(BisectionOutcome {
            solutions: pairs.iter().map(|(_, c)| CMat::zeros(c.rows(), c.cols())).collect(),
            eta: T::zero(),
        });
    }

    let eval = |eta: T| -> Option<(Vec<CMat<T>>, T)> {
        let mut total = T::zero();
        let mut sols = Vec::with_capacity(pairs.len());
        for (d, c) in pairs {
            let f = d.shifted(eta).factor().ok()?;
            let s = f.solve(c);
            total += s.norm_sq();
            sols.push(s);
        }
        total.is_finite().then_some((sols, total))
    };

    if let Some((sols, nsq)) = eval(T::zero()) {
        if nsq <= radius_sq {
            return Ok(BisectionOutcome {
                solutions: sols,
                eta: T::zero(),
            });
        }
    }

    let two = T::lit(2.0);
    let mut lo = T::zero();
    let mut hi = T::one();
    let mut best = None;
    for _ in 0..MAX_DOUBLINGS {
        match eval(hi) {
            Some((sols, nsq)) if nsq <= radius_sq => {
                best = Some((sols, nsq));
                break;
            }
            _ => {
                lo = hi;
                hi = hi * two;
            }
        }
    }
    let (mut sols, mut nsq) = best.ok_or(FpError::BisectionFailed(MAX_DOUBLINGS))?;

    for _ in 0..MAX_HALVINGS {
        if radius_sq - nsq <= tol * radius_sq {
            break;
        }
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        match eval(mid) {
            Some((s, n)) if n <= radius_sq => {
                hi = mid;
                sols = s;
                nsq = n;
            }
            _ => lo = mid,
        }
    }
    Ok(BisectionOutcome { solutions: sols, eta: hi })
}

use std::sync::Arc;

use crate::error::{FpError, Result};
use crate::model::{self, DenomTerm, Iterate, Ratio, RatioProblem};
use crate::scalar::Real;

/// Per-ratio auxiliaries of the dual transform (one SINR-like value per ratio).
pub type AuxT<T> = Vec<T>;

/// `max Σ_i μ_i log(1 + M_i(x))` with vector variables.
///
/// Alongside the ratios `M_i` it keeps the companion problem whose denominators also
/// contain the numerator term, so that `M̂_i = M_i / (1 + M_i)`.
#[derive(Clone, Debug)]
pub struct LogFpProblem<T> {
    base: RatioProblem<T>,
    hat: RatioProblem<T>,
}

impl<T: Real> LogFpProblem<T> {
    /// `base` supplies the ratios, the constraints and, as its weights, the rate weights `μ`.
    pub fn new(base: RatioProblem<T>) -> Result<Self> {
        if base.cols() != 1 {
            return Err(FpError::InvalidProblem("log-FP problems need vector variables".into()));
        }
        let hat_ratios = base
            .ratios()
            .iter()
            .map(|r| {
                let mut terms = r.terms.clone();
                terms.push(DenomTerm {
                    block: r.block,
                    coeff: Arc::clone(&r.numerator),
                });
                Ratio {
                    block: r.block,
                    numerator: Arc::clone(&r.numerator),
                    terms,
                    regularizer: r.regularizer,
                }
            })
            .collect();
        let hat = RatioProblem::new(
            base.block_rows().to_vec(),
            1,
            hat_ratios,
            base.weights().to_vec(),
            base.constraints().to_vec(),
        )?;
        Ok(Self { base, hat })
    }

    pub fn base(&self) -> &RatioProblem<T> {
        &self.base
    }

    /// Ratios `M̂_i` with the numerator term added to each denominator.
    pub fn hat(&self) -> &RatioProblem<T> {
        &self.hat
    }

    pub fn mu(&self) -> &[T] {
        self.base.weights()
    }

    pub fn num_ratios(&self) -> usize {
        self.base.num_ratios()
    }

    /// The companion problem weighted by `μ_i (1 + t_i)`.
    pub fn weighted_hat(&self, t: &[T]) -> Result<RatioProblem<T>> {
        let w = self.mu().iter().zip(t).map(|(&m, &ti)| m * (T::one() + ti)).collect();
        self.hat.with_weights(w)
    }
}

/// `M_i(x)` for every ratio.
pub fn optimal_t<T: Real>(p: &LogFpProblem<T>, x: &Iterate<T>) -> Result<AuxT<T>> {
    Ok(model::evaluate(p.base(), x)?.ratios)
}

/// `Σ μ_i log(1 + M_i(x))`.
pub fn log_objective<T: Real>(p: &LogFpProblem<T>, x: &Iterate<T>) -> Result<T> {
    let t = optimal_t(p, x)?;
    Ok(log_value(p.mu(), &t))
}

pub(crate) fn log_value<T: Real>(mu: &[T], t: &[T]) -> T {
    mu.iter().zip(t).fold(T::zero(), |acc, (&m, &ti)| acc + m * ti.ln_1p())
}

/// `Σ μ_i (1 + t_i) M̂_i(x) + Σ μ_i (log(1 + t_i) − t_i)`, a lower bound on the log objective
/// that is tight at `t = optimal_t(x)`.
pub fn dual_transform_surrogate<T: Real>(p: &LogFpProblem<T>, x: &Iterate<T>, t: &[T]) -> Result<T> {
    if t.len() != p.num_ratios() {
        return Err(FpError::Dimension(format!("{} auxiliaries for {} ratios", t.len(), p.num_ratios())));
    }
    if t.iter().any(|&ti| !(ti >= T::zero())) {
        return Err(FpError::InvalidParams("auxiliaries must be nonnegative".into()));
    }
    let hat = model::evaluate(p.hat(), x)?.ratios;
    Ok(p.mu()
        .iter()
        .zip(t)
        .zip(hat)
        .fold(T::zero(), |acc, ((&m, &ti), mh)| {
            acc + m * (T::one() + ti) * mh + m * (ti.ln_1p() - ti)
        }))
}

/// Random interference network: ratio `i` is user `i`'s SINR with direct channel `H_ii`,
/// interference from every other block, noise `noise · I` and a per-block power ball.
pub fn random_interference<T: Real, R: rand::Rng + ?Sized>(
    users: usize,
    tx: usize,
    rx: usize,
    noise: f64,
    power: f64,
    rng: &mut R,
) -> Result<LogFpProblem<T>> {
    use crate::linalg::ConstraintSpec;
    use crate::model::random::complex_gaussian;
    let ratios = (0..users)
        .map(|i| {
            let chans: Vec<Arc<crate::linalg::CMat<T>>> =
                (0..users).map(|_| Arc::new(complex_gaussian(rng, rx, tx))).collect();
            Ratio {
                block: i,
                numerator: Arc::clone(&chans[i]),
                terms: (0..users)
                    .filter(|&j| j != i)
                    .map(|j| DenomTerm {
                        block: j,
                        coeff: Arc::clone(&chans[j]),
                    })
                    .collect(),
                regularizer: T::lit(noise),
            }
        })
        .collect();
    let base = RatioProblem::new(
        vec![tx; users],
        1,
        ratios,
        vec![T::one(); users],
        vec![ConstraintSpec::Ball { radius_sq: T::lit(power) }; users],
    )?;
    LogFpProblem::new(base)
}

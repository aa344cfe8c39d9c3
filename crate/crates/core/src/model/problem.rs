//! The sum-of-weighted-ratios problem description and its wire format.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::blocks::Iterate;
use crate::error::{FpError, Result};
use crate::linalg::{constraint_groups, project_all, CMat, ConstraintGroup, ConstraintSpec};
use crate::scalar::Real;

/// One interference-type term `B X_b X_bᴴ Bᴴ` inside a ratio's denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct DenomTerm<T> {
    pub block: usize,
    pub coeff: Arc<CMat<T>>,
}

/// The ratio `tr((A X_b)ᴴ (σ I + Σ_terms B X_j X_jᴴ Bᴴ)⁻¹ (A X_b))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ratio<T> {
    /// Block the numerator acts on.
    pub block: usize,
    pub numerator: Arc<CMat<T>>,
    pub terms: Vec<DenomTerm<T>>,
    /// Coefficient of the identity added to the denominator.
    pub regularizer: T,
}

impl<T: Real> Ratio<T> {
    /// Output dimension `ℓ` of the ratio (rows of its numerator matrix).
    pub fn dim(&self) -> usize {
        self.numerator.rows()
    }
}

/// `maximize Σ_i ω_i · ratio_i(X)` subject to per-block (or per-group) power balls.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioProblem<T> {
    block_rows: Vec<usize>,
    cols: usize,
    ratios: Vec<Ratio<T>>,
    weights: Vec<T>,
    constraints: Vec<ConstraintSpec<T>>,
    groups: Vec<ConstraintGroup<T>>,
}

impl<T: Real> RatioProblem<T> {
    /// Validates dimensions, weights, regularizers and the constraint partition.
    pub fn new(
        block_rows: Vec<usize>,
        cols: usize,
        ratios: Vec<Ratio<T>>,
        weights: Vec<T>,
        constraints: Vec<ConstraintSpec<T>>,
    ) -> Result<Self> {
        let nb = block_rows.len();
        if cols == 0 || block_rows.iter().any(|&d| d == 0) {
            return Err(FpError::InvalidProblem("zero-sized variable block".into()));
        }
        if ratios.is_empty() {
            return Err(FpError::InvalidProblem("at least one ratio is required".into()));
        }
        if weights.len() != ratios.len() {
            return Err(FpError::InvalidProblem(format!(
                "{} weights for {} ratios",
                weights.len(),
                ratios.len()
            )));
        }
        if constraints.len() != nb {
            return Err(FpError::InvalidProblem(format!(
                "{} constraint specs for {nb} blocks",
                constraints.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > T::zero()) || !w.is_finite()) {
            return Err(FpError::InvalidProblem(format!("weights must be positive, got {w}")));
        }
        for (i, r) in ratios.iter().enumerate() {
            if r.block >= nb {
                return Err(FpError::InvalidProblem(format!("ratio {i} refers to missing block {}", r.block)));
            }
            if r.numerator.cols() != block_rows[r.block] {
                return Err(FpError::Dimension(format!(
                    "ratio {i}: numerator has {} columns, block {} has {} rows",
                    r.numerator.cols(),
                    r.block,
                    block_rows[r.block]
                )));
            }
            if !(r.regularizer >= T::zero()) || !r.regularizer.is_finite() {
                return Err(FpError::InvalidProblem(format!("ratio {i}: regularizer must be ≥ 0")));
            }
            if r.regularizer == T::zero() && r.terms.is_empty() {
                return Err(FpError::InvalidProblem(format!("ratio {i}: empty denominator")));
            }
            for t in &r.terms {
                if t.block >= nb {
                    return Err(FpError::InvalidProblem(format!("ratio {i}: term on missing block {}", t.block)));
                }
                if t.coeff.rows() != r.dim() || t.coeff.cols() != block_rows[t.block] {
                    return Err(FpError::Dimension(format!(
                        "ratio {i}: term coefficient is {}x{}, expected {}x{}",
                        t.coeff.rows(),
                        t.coeff.cols(),
                        r.dim(),
                        block_rows[t.block]
                    )));
                }
            }
        }
        let groups = constraint_groups(&constraints)?;
        Ok(Self {
            block_rows,
            cols,
            ratios,
            weights,
            constraints,
            groups,
        })
    }

    /// Square layout: `n` ratios on `n` blocks with a full `n × n` table of `B_ij`,
    /// ratio `i` acting on block `i`, and one regularizer shared by every denominator.
    pub fn dense(
        numerators: Vec<CMat<T>>,
        cross: Vec<Vec<CMat<T>>>,
        cols: usize,
        weights: Vec<T>,
        regularizer: T,
        constraints: Vec<ConstraintSpec<T>>,
    ) -> Result<Self> {
        let n = numerators.len();
        if cross.len() != n || cross.iter().any(|row| row.len() != n) {
            return Err(FpError::Dimension(format!("expected a {n}x{n} table of B matrices")));
        }
        let block_rows = numerators.iter().map(|a| a.cols()).collect();
        let ratios = numerators
            .into_iter()
            .zip(cross)
            .enumerate()
            .map(|(i, (a, row))| Ratio {
                block: i,
                numerator: Arc::new(a),
                terms: row
                    .into_iter()
                    .enumerate()
                    .map(|(j, b)| DenomTerm {
                        block: j,
                        coeff: Arc::new(b),
                    })
                    .collect(),
                regularizer,
            })
            .collect();
        Self::new(block_rows, cols, ratios, weights, constraints)
    }

    /// Number of ratio terms.
    #[inline]
    pub fn num_ratios(&self) -> usize {
        self.ratios.len()
    }

    /// Number of variable blocks.
    #[inline]
    pub fn num_blocks(&self) -> usize {
        self.block_rows.len()
    }

    /// Columns `m` shared by every block (1 for vector variables).
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn block_rows(&self) -> &[usize] {
        &self.block_rows
    }

    pub fn block_shapes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.block_rows.iter().map(move |&d| (d, self.cols))
    }

    pub fn y_shapes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ratios.iter().map(move |r| (r.dim(), self.cols))
    }

    pub fn ratios(&self) -> &[Ratio<T>] {
        &self.ratios
    }

    pub fn ratio(&self, i: usize) -> &Ratio<T> {
        &self.ratios[i]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn constraints(&self) -> &[ConstraintSpec<T>] {
        &self.constraints
    }

    pub fn groups(&self) -> &[ConstraintGroup<T>] {
        &self.groups
    }

    /// Same structure with new weights (coefficient matrices are shared, not copied).
    pub fn with_weights(&self, weights: Vec<T>) -> Result<Self> {
        Self::new(
            self.block_rows.clone(),
            self.cols,
            self.ratios.clone(),
            weights,
            self.constraints.clone(),
        )
    }

    /// Checks the shapes of an iterate against the problem.
    pub fn check_iterate(&self, x: &Iterate<T>) -> Result<()> {
        if x.len() != self.num_blocks() {
            return Err(FpError::Dimension(format!(
                "iterate has {} blocks, problem has {}",
                x.len(),
                self.num_blocks()
            )));
        }
        for (b, (blk, &d)) in x.iter().zip(&self.block_rows).enumerate() {
            if blk.shape() != (d, self.cols) {
                return Err(FpError::Dimension(format!(
                    "block {b} is {}x{}, expected {d}x{}",
                    blk.rows(),
                    blk.cols(),
                    self.cols
                )));
            }
        }
        Ok(())
    }

    /// Euclidean projection of an arbitrary point onto the feasible set.
    pub fn project(&self, x: &Iterate<T>) -> Iterate<T> {
        let mut out = x.clone();
        project_all(&self.groups, &mut out.0);
        out
    }

    /// Whether every power constraint holds within `rel_tol · radius²`.
    pub fn is_feasible(&self, x: &Iterate<T>, rel_tol: T) -> bool {
        self.groups.iter().all(|g| match g.radius_sq() {
            None => true,
            Some(r) => {
                let total = g.members().iter().fold(T::zero(), |s, &m| s + x[m].norm_sq());
                total <= r * (T::one() + rel_tol)
            }
        })
    }

    /// Blocks feeding a `ratio → (numerator block)` map, inverted: which ratios use block `b` as numerator.
    pub fn ratios_on_block(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        self.ratios.iter().enumerate().filter(move |(_, r)| r.block == b).map(|(i, _)| i)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&ProblemWire::from(self)).map_err(|e| FpError::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let w: ProblemWire<T> = serde_json::from_str(s).map_err(|e| FpError::Parse(e.to_string()))?;
        w.into_problem()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct RatioWire<T> {
    block: usize,
    ell: usize,
    regularizer: T,
    numerator: CMat<T>,
    terms: Vec<TermWire<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct TermWire<T> {
    block: usize,
    coeff: CMat<T>,
}

/// Text document form of a [`RatioProblem`].
#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct ProblemWire<T> {
    n: usize,
    m: usize,
    block_rows: Vec<usize>,
    weights: Vec<T>,
    constraints: Vec<ConstraintSpec<T>>,
    ratios: Vec<RatioWire<T>>,
}

impl<T: Real> From<&RatioProblem<T>> for ProblemWire<T> {
    fn from(p: &RatioProblem<T>) -> Self {
        Self {
            n: p.num_ratios(),
            m: p.cols,
            block_rows: p.block_rows.clone(),
            weights: p.weights.clone(),
            constraints: p.constraints.clone(),
            ratios: p
                .ratios
                .iter()
                .map(|r| RatioWire {
                    block: r.block,
                    ell: r.dim(),
                    regularizer: r.regularizer,
                    numerator: (*r.numerator).clone(),
                    terms: r
                        .terms
                        .iter()
                        .map(|t| TermWire {
                            block: t.block,
                            coeff: (*t.coeff).clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl<T: Real> ProblemWire<T> {
    fn into_problem(self) -> Result<RatioProblem<T>> {
        if self.n != self.ratios.len() {
            return Err(FpError::Parse(format!("n = {} but {} ratios listed", self.n, self.ratios.len())));
        }
        let mut ratios = Vec::with_capacity(self.ratios.len());
        for (i, r) in self.ratios.into_iter().enumerate() {
            if r.numerator.rows() != r.ell {
                return Err(FpError::Parse(format!("ratio {i}: ell = {} disagrees with numerator", r.ell)));
            }
            ratios.push(Ratio {
                block: r.block,
                numerator: Arc::new(r.numerator),
                terms: r
                    .terms
                    .into_iter()
                    .map(|t| DenomTerm {
                        block: t.block,
                        coeff: Arc::new(t.coeff),
                    })
                    .collect(),
                regularizer: r.regularizer,
            });
        }
        RatioProblem::new(self.block_rows, self.m, ratios, self.weights, self.constraints)
    }
}

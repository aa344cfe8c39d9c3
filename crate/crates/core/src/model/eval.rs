//! Ratio values, objective, gradient and the two quadratic-transform surrogates.

use super::blocks::{AuxY, AuxZ, Blocks, Iterate};
use super::problem::RatioProblem;
use crate::error::{FpError, Result};
use crate::linalg::{Hermitian, HermitianPd, CMat};
use crate::scalar::Real;

/// Unfactored denominator `σ_i I + Σ_terms B X_j X_jᴴ Bᴴ` of ratio `i`.
pub fn denominator_matrix<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>, i: usize) -> Hermitian<T> {
    let r = p.ratio(i);
    let mut den = CMat::scaled_identity(r.dim(), r.regularizer);
    for t in &r.terms {
        let bx = t.coeff.matmul(&x[t.block]);
        den.add_gram(&bx, T::one());
    }
    Hermitian::from_trusted(den)
}

/// Denominator of ratio `i`, factored.
pub fn denominator<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>, i: usize) -> Result<HermitianPd<T>> {
    if i >= p.num_ratios() {
        return Err(FpError::Dimension(format!("ratio index {i} out of range")));
    }
    denominator_matrix(p, x, i).factor()
}

/// `tr((A_i X)ᴴ · den_i⁻¹ · (A_i X))`.
pub fn ratio_value<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>, i: usize) -> Result<T> {
    let den = denominator(p, x, i)?;
    let ax = p.ratio(i).numerator.matmul(&x[p.ratio(i).block]);
    let y = den.solve(&ax);
    Ok(ax.inner(&y).re)
}

/// Weighted sum of ratios.
pub fn objective<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>) -> Result<T> {
    Ok(evaluate(p, x)?.objective)
}

/// Everything the solvers need at one point: optimal `Y`, individual ratios and the objective.
#[derive(Clone, Debug)]
pub struct Evaluation<T> {
    pub y: AuxY<T>,
    pub ratios: Vec<T>,
    pub objective: T,
}

/// Evaluates ratios, objective and the optimal auxiliaries `Y_i = den_i⁻¹ A_i X_i` in one pass.
pub fn evaluate<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>) -> Result<Evaluation<T>> {
    p.check_iterate(x)?;
    let mut ys = Vec::with_capacity(p.num_ratios());
    let mut ratios = Vec::with_capacity(p.num_ratios());
    let mut obj = T::zero();
    for (i, r) in p.ratios().iter().enumerate() {
        let den = denominator_matrix(p, x, i).factor()?;
        let ax = r.numerator.matmul(&x[r.block]);
        let y = den.solve(&ax);
        let v = ax.inner(&y).re;
        obj += p.weights()[i] * v;
        ratios.push(v);
        ys.push(y);
    }
    Ok(Evaluation {
        y: Blocks(ys),
        ratios,
        objective: obj,
    })
}

/// Maximizer of `f_q(x, ·)`.
pub fn optimal_y<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>) -> Result<AuxY<T>> {
    Ok(evaluate(p, x)?.y)
}

/// Quadratic-transform surrogate
/// `Σ_i ω_i [2Re tr(X_bᴴ A_iᴴ Y_i) − Σ_terms ‖Y_iᴴ B X_j‖² − σ_i ‖Y_i‖²]`.
pub fn f_q<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>, y: &AuxY<T>) -> T {
    let two = T::lit(2.0);
    let mut total = T::zero();
    for (i, r) in p.ratios().iter().enumerate() {
        let yi = &y[i];
        let ax = r.numerator.matmul(&x[r.block]);
        let mut term = two * ax.inner(yi).re - r.regularizer * yi.norm_sq();
        for t in &r.terms {
            let bx = t.coeff.matmul(&x[t.block]);
            term -= yi.adj_mul(&bx).norm_sq();
        }
        total += p.weights()[i] * term;
    }
    total
}

/// `D_b = Σ_i ω_i Σ_{terms on b} Bᴴ Y_i Y_iᴴ B` for every block.
pub fn dmats<T: Real>(p: &RatioProblem<T>, y: &AuxY<T>) -> Vec<Hermitian<T>> {
    let mut ds: Vec<CMat<T>> = p.block_rows().iter().map(|&d| CMat::zeros(d, d)).collect();
    for (i, r) in p.ratios().iter().enumerate() {
        let w = p.weights()[i];
        for t in &r.terms {
            let by = t.coeff.adj_mul(&y[i]);
            ds[t.block].add_gram(&by, w);
        }
    }
    ds.into_iter().map(Hermitian::from_trusted).collect()
}

/// `D_b` for a single block.
pub fn dmat<T: Real>(p: &RatioProblem<T>, y: &AuxY<T>, b: usize) -> Hermitian<T> {
    let d = p.block_rows()[b];
    let mut acc = CMat::zeros(d, d);
    for (i, r) in p.ratios().iter().enumerate() {
        for t in r.terms.iter().filter(|t| t.block == b) {
            acc.add_gram(&t.coeff.adj_mul(&y[i]), p.weights()[i]);
        }
    }
    Hermitian::from_trusted(acc)
}

/// Linear coefficient `c_b = Σ_{i : block(i) = b} ω_i A_iᴴ Y_i` of block `b` in `f_q`.
pub fn numerator_targets<T: Real>(p: &RatioProblem<T>, y: &AuxY<T>) -> Blocks<T> {
    let mut cs = Blocks::zeros(p.block_shapes());
    for (i, r) in p.ratios().iter().enumerate() {
        let ay = r.numerator.adj_mul(&y[i]);
        cs[r.block].axpy(p.weights()[i], &ay);
    }
    cs
}

/// Conjugate-coordinate gradient `∂f_o/∂X_b^c`, assembled ratio by ratio from the
/// per-ratio partial derivatives at `Y = optimal_y(X)`.
pub fn gradient<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>) -> Result<Blocks<T>> {
    let y = optimal_y(p, x)?;
    Ok(gradient_with_y(p, x, &y))
}

pub(crate) fn gradient_with_y<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>, y: &AuxY<T>) -> Blocks<T> {
    let two = T::lit(2.0);
    let mut g = Blocks::zeros(p.block_shapes());
    for (i, r) in p.ratios().iter().enumerate() {
        let w = two * p.weights()[i];
        let yi = &y[i];
        // ∂ tr(M_i) / ∂X_b^c: +2 A_iᴴ Y_i on its own block, −2 Bᴴ Y_i Y_iᴴ B X_j per term.
        g[r.block].axpy(w, &r.numerator.adj_mul(yi));
        for t in &r.terms {
            let by = t.coeff.adj_mul(yi);
            let proj = by.adj_mul(&x[t.block]);
            g[t.block].axpy(-w, &by.matmul(&proj));
        }
    }
    g
}

/// Nonhomogeneous lower bound of `f_q` around anchor `Z` with step constants `λ_b ≥ λ_max(D_b)`.
pub fn f_t<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>, y: &AuxY<T>, z: &AuxZ<T>, lambdas: &[T]) -> T {
    let ds = dmats(p, y);
    let cs = numerator_targets(p, y);
    f_t_with(p, x, y, z, lambdas, &ds, &cs)
}

fn f_t_with<T: Real>(
    p: &RatioProblem<T>,
    x: &Iterate<T>,
    y: &AuxY<T>,
    z: &AuxZ<T>,
    lambdas: &[T],
    ds: &[Hermitian<T>],
    cs: &Blocks<T>,
) -> T {
    let two = T::lit(2.0);
    let mut total = T::zero();
    for b in 0..p.num_blocks() {
        let lam = lambdas[b];
        let (xb, zb) = (&x[b], &z[b]);
        let dz = ds[b].matrix().matmul(zb);
        // (λI − D) Z
        let mut lz = zb.scale(lam);
        lz.axpy(-T::one(), &dz);
        let lin = xb.inner(&cs[b]) + xb.inner(&lz);
        total += two * lin.re - zb.inner(&lz).re - lam * xb.norm_sq();
    }
    for (i, r) in p.ratios().iter().enumerate() {
        total -= p.weights()[i] * r.regularizer * y[i].norm_sq();
    }
    total
}

/// `Σ_i ω_i (Y_i − Y_i*)ᴴ den_i (Y_i − Y_i*)`, the exact gap `f_o − f_q`.
pub fn f_q_gap<T: Real>(p: &RatioProblem<T>, x: &Iterate<T>, y: &AuxY<T>) -> Result<T> {
    let ystar = optimal_y(p, x)?;
    let mut gap = T::zero();
    for i in 0..p.num_ratios() {
        let den = denominator_matrix(p, x, i);
        let diff = y[i].sub(&ystar[i]);
        gap += p.weights()[i] * den.quad_form(&diff);
    }
    Ok(gap)
}

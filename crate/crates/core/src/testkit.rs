//! Reference routines that share no code with the solvers, for cross-checking them.
//!
//! Everything here is `f64`, dense and deliberately naive.

use num_complex::Complex64;

use crate::linalg::CMat;
use crate::model::{Blocks, Iterate};

/// Gaussian elimination with partial pivoting; returns `None` for a numerically singular matrix.
pub fn lu_solve(a: &CMat<f64>, b: &CMat<f64>) -> Option<CMat<f64>> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.rows(), n);
    let k = b.cols();
    let mut m: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            let mut row: Vec<Complex64> = (0..n).map(|j| a[(i, j)]).collect();
            row.extend((0..k).map(|j| b[(i, j)]));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm()))?;
        if m[piv][col].norm() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != Complex64::new(0.0, 0.0) {
                for c in col..n + k {
                    let v = m[col][c];
                    m[r][c] -= f * v;
                }
            }
        }
    }
    let mut x = vec![vec![Complex64::new(0.0, 0.0); k]; n];
    for i in (0..n).rev() {
        for c in 0..k {
            let mut s = m[i][n + c];
            for j in i + 1..n {
                s -= m[i][j] * x[j][c];
            }
            x[i][c] = s / m[i][i];
        }
    }
    Some(CMat::from_fn(n, k, |i, j| x[i][j]))
}

pub fn lu_inverse(a: &CMat<f64>) -> Option<CMat<f64>> {
    lu_solve(a, &CMat::identity(a.rows()))
}

/// Eigenvalues (ascending) of a Hermitian matrix via cyclic Jacobi on its real `2n × 2n` embedding.
///
/// Every eigenvalue of the embedding appears twice; one copy of each pair is returned.
pub fn hermitian_eigenvalues(h: &CMat<f64>) -> Vec<f64> {
    let n = h.rows();
    let nn = 2 * n;
    let mut s = vec![vec![0.0; nn]; nn];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            s[i][j] = z.re;
            s[i + n][j + n] = z.re;
            s[i][j + n] = -z.im;
            s[i + n][j] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..nn)
            .flat_map(|i| (0..nn).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j] * s[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..nn {
            for q in p + 1..nn {
                if s[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..nn {
                    let (skp, skq) = (s[k][p], s[k][q]);
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..nn {
                    let (spk, sqk) = (s[p][k], s[q][k]);
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..nn).map(|i| s[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Conjugate-coordinate gradient of `f` by central differences on real and imaginary parts.
pub fn finite_difference_gradient(f: impl Fn(&Iterate<f64>) -> f64, x: &Iterate<f64>, h: f64) -> Blocks<f64> {
    let mut g = Blocks::zeros(x.iter().map(CMat::shape));
    for b in 0..x.len() {
        let (rows, cols) = x[b].shape();
        for r in 0..rows {
            for c in 0..cols {
                let bump = |dz: Complex64| {
                    let mut xp = x.clone();
                    let mut entries = xp[b].clone().into_vec();
                    entries[r * cols + c] += dz;
                    xp[b] = CMat::from_vec(rows, cols, entries).expect("finite");
                    f(&xp)
                };
                let d_re = (bump(Complex64::new(h, 0.0)) - bump(Complex64::new(-h, 0.0))) / (2.0 * h);
                let d_im = (bump(Complex64::new(0.0, h)) - bump(Complex64::new(0.0, -h))) / (2.0 * h);
                // ∂/∂Re + j ∂/∂Im, i.e. twice the Wirtinger derivative ∂/∂z̄.
                let mut entries = g[b].clone().into_vec();
                entries[r * cols + c] = Complex64::new(d_re, d_im);
                g[b] = CMat::from_vec(rows, cols, entries).expect("finite");
            }
        }
    }
    g
}

/// Grid search for `min xᴴ d x − 2Re xᴴ target` over `x(η) = (d + ηI)⁻¹ target`, `‖x‖² ≤ radius_sq`.
///
/// A log-spaced grid of `points` multipliers up to `max(eta_max, ‖target‖/√radius_sq)` (always
/// feasible) is scanned, then the interval around the smallest feasible grid point is regridded
/// a few times. Returns the best feasible value found.
pub fn eta_grid_subproblem(d: &CMat<f64>, target: &CMat<f64>, radius_sq: f64, eta_max: f64, points: usize) -> f64 {
    let solve = |eta: f64| {
        let mut shifted = d.clone();
        shifted.add_diag(eta);
        lu_solve(&shifted, target).filter(|x| x.is_finite() && x.norm_sq() <= radius_sq * (1.0 + 1e-12))
    };
    let hi = eta_max.max(target.frobenius() / radius_sq.sqrt());
    let lo = hi * 1e-14;
    let mut grid: Vec<f64> = std::iter::once(0.0)
        .chain((0..points).map(|k| lo * (hi / lo).powf(k as f64 / (points - 1) as f64)))
        .collect();
    let mut best = f64::INFINITY;
    for _ in 0..4 {
        let mut first_feasible = None;
        for (k, &eta) in grid.iter().enumerate() {
            if let Some(x) = solve(eta) {
                best = best.min(subproblem_value(d, target, &x));
                first_feasible.get_or_insert(k);
            }
        }
        match first_feasible {
            Some(k) if k > 0 => {
                let (a, b) = (grid[k - 1], grid[k]);
                grid = (0..points).map(|j| a + (b - a) * j as f64 / (points - 1) as f64).collect();
            }
            _ => break,
        }
    }
    best
}

/// `xᴴ d x − 2Re xᴴ target`, the quantity minimized by the multiplier search.
pub fn subproblem_value(d: &CMat<f64>, target: &CMat<f64>, x: &CMat<f64>) -> f64 {
    x.inner(&d.matmul(x)).re - 2.0 * x.inner(target).re
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}

/// Objective recomputed from scratch with an LU-based inverse: `Σ ω_i tr((A X)ᴴ den⁻¹ (A X))`.
pub fn naive_objective(p: &crate::model::RatioProblem<f64>, x: &Iterate<f64>) -> f64 {
    naive_ratios(p, x).iter().zip(p.weights()).map(|(r, w)| r * w).sum()
}

pub fn naive_ratios(p: &crate::model::RatioProblem<f64>, x: &Iterate<f64>) -> Vec<f64> {
    p.ratios()
        .iter()
        .map(|r| {
            let mut den = CMat::identity(r.dim()).scale(r.regularizer);
            for t in &r.terms {
                let bx = t.coeff.matmul(&x[t.block]);
                den = den.add(&bx.matmul(&bx.adjoint()));
            }
            let ax = r.numerator.matmul(&x[r.block]);
            let inv = lu_inverse(&den).expect("nonsingular denominator");
            ax.adjoint().matmul(&inv).matmul(&ax).trace().re
        })
        .collect()
}

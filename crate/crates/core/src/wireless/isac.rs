//! Two-cell integrated sensing and communication: BS 1 senses a target and serves user 1,
//! BS 2 serves user 2 and leaks into BS 1's radar receiver.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::geometry::{broadside_angle, dbm_to_watts, distance, isac_path_loss_db, steering_derivative, db_to_linear};
use crate::error::{FpError, Result};
use crate::linalg::{
    regularized_inverse_bisection, spectral_upper_bound, project_ball, CMat, ConstraintSpec, Hermitian, SpectralMode,
};
use crate::model::random::{complex_gaussian, seeded_rng};
use crate::model::{Blocks, DenomTerm, Iterate, Ratio, RatioProblem};
use crate::solvers::{run, ConvergenceTrace, SolverId, SolverOptions};

/// Physical description of the ISAC setup; channels are drawn from it with a seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsacParams {
    pub tx_antennas: usize,
    pub user_antennas: usize,
    pub radar_antennas: usize,
    /// Echo power factor `2|ξ|²`.
    pub alpha: f64,
    pub user_noise_dbm: [f64; 2],
    pub radar_noise_dbm: f64,
    pub power_dbm: f64,
    pub sinr_weights: [f64; 2],
    pub bs: [[f64; 2]; 2],
    pub users: [[f64; 2]; 2],
    pub target: [f64; 2],
}

impl Default for IsacParams {
    fn default() -> Self {
        Self {
            tx_antennas: 64,
            user_antennas: 2,
            radar_antennas: 72,
            alpha: 1.0,
            user_noise_dbm: [-80.0, -80.0],
            radar_noise_dbm: -80.0,
            power_dbm: 20.0,
            sinr_weights: [1e5, 1e5],
            bs: [[0.0, 0.0], [250.0, 0.0]],
            users: [[-10.0, 100.0], [350.0, 100.0]],
            target: [200.0, 200.0],
        }
    }
}

impl IsacParams {
    pub fn validate(&self) -> Result<()> {
        if self.tx_antennas == 0 || self.user_antennas == 0 || self.radar_antennas == 0 {
            return Err(FpError::InvalidParams("antenna counts must be positive".into()));
        }
        if !(self.alpha >= 0.0) || self.sinr_weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(FpError::InvalidParams("alpha and SINR weights must be nonnegative".into()));
        }
        let all_finite = self.user_noise_dbm.iter().chain([&self.radar_noise_dbm, &self.power_dbm]).all(|v| v.is_finite());
        if !all_finite {
            return Err(FpError::InvalidParams("noise and power levels must be finite".into()));
        }
        Ok(())
    }
}

/// A drawn ISAC instance in linear units.
#[derive(Clone, Debug, PartialEq)]
pub struct IsacScenario {
    pub params: IsacParams,
    pub seed: u64,
    pub theta: f64,
    pub alpha: f64,
    pub user_noise: [f64; 2],
    pub radar_noise: f64,
    pub power: f64,
    pub sinr_weights: [f64; 2],
    /// `h[i][j]`: BS `j` to user `i` (`N × M`).
    pub h: [[CMat<f64>; 2]; 2],
    /// BS 2 to the radar receiver of BS 1 (`N_r × M`).
    pub g: CMat<f64>,
    /// `∂/∂θ (a_r a_tᵀ)` at the target angle (`N_r × M`).
    pub a_dot: CMat<f64>,
}

impl IsacScenario {
    pub fn generate(params: &IsacParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let mut rng = seeded_rng(seed);
        let (m, n, nr) = (params.tx_antennas, params.user_antennas, params.radar_antennas);
        let mut link = |rows: usize, from: [f64; 2], to: [f64; 2]| {
            let gain = db_to_linear(-isac_path_loss_db(distance(from, to).max(1.0)));
            complex_gaussian::<f64, _>(&mut rng, rows, m).scale(gain.sqrt())
        };
        let h = [
            [link(n, params.bs[0], params.users[0]), link(n, params.bs[1], params.users[0])],
            [link(n, params.bs[0], params.users[1]), link(n, params.bs[1], params.users[1])],
        ];
        let g = link(nr, params.bs[1], params.bs[0]);
        let theta = broadside_angle(params.bs[0], params.target);
        Ok(Self {
            params: params.clone(),
            seed,
            theta,
            alpha: params.alpha,
            user_noise: params.user_noise_dbm.map(dbm_to_watts),
            radar_noise: dbm_to_watts(params.radar_noise_dbm),
            power: dbm_to_watts(params.power_dbm),
            sinr_weights: params.sinr_weights,
            h,
            g,
            a_dot: steering_derivative(theta, m, nr),
        })
    }

    pub fn tx_antennas(&self) -> usize {
        self.params.tx_antennas
    }

    /// Gaussian precoders scaled onto the power budget.
    pub fn random_precoders(&self, seed: u64) -> Iterate<f64> {
        let mut rng = seeded_rng(seed);
        let m = self.tx_antennas();
        Blocks(
            (0..2)
                .map(|_| {
                    let v = complex_gaussian::<f64, _>(&mut rng, m, 1);
                    v.scale((self.power / v.norm_sq()).sqrt())
                })
                .collect(),
        )
    }
}

/// `α v₁ᴴ Ȧᴴ (σ_r² I + G v₂ v₂ᴴ Gᴴ)⁻¹ Ȧ v₁`.
pub fn fisher_information(s: &IsacScenario, v1: &CMat<f64>, v2: &CMat<f64>) -> Result<f64> {
    let gv = s.g.matmul(v2);
    let q = CMat::identity(gv.rows()).scale(s.radar_noise).add(&gv.matmul(&gv.adjoint()));
    let av = s.a_dot.matmul(v1);
    let sol = Hermitian::new(q)?.factor()?.solve(&av);
    Ok(s.alpha * av.inner(&sol).re)
}

/// SINR of downlink user `i ∈ {0, 1}`.
pub fn isac_sinr(s: &IsacScenario, v: &Iterate<f64>, i: usize) -> Result<f64> {
    let j = 1 - i;
    let hv = s.h[i][j].matmul(&v[j]);
    let cov = CMat::identity(hv.rows()).scale(s.user_noise[i]).add(&hv.matmul(&hv.adjoint()));
    let sig = s.h[i][i].matmul(&v[i]);
    let sol = Hermitian::new(cov)?.factor()?.solve(&sig);
    Ok(sig.inner(&sol).re)
}

/// `J_θ + ω₁ SINR₁ + ω₂ SINR₂` evaluated directly.
pub fn isac_objective(s: &IsacScenario, v: &Iterate<f64>) -> Result<f64> {
    Ok(fisher_information(s, &v[0], &v[1])?
        + s.sinr_weights[0] * isac_sinr(s, v, 0)?
        + s.sinr_weights[1] * isac_sinr(s, v, 1)?)
}

/// Sensing ratio (weight 1, numerator `√α Ȧ`) followed by the SINR ratios with nonzero weight.
pub fn compile_isac(s: &IsacScenario) -> Result<RatioProblem<f64>> {
    let arc = |m: &CMat<f64>| Arc::new(m.clone());
    let mut ratios = vec![Ratio {
        block: 0,
        numerator: Arc::new(s.a_dot.scale(s.alpha.sqrt())),
        terms: vec![DenomTerm { block: 1, coeff: arc(&s.g) }],
        regularizer: s.radar_noise,
    }];
    let mut weights = vec![1.0];
    for i in 0..2 {
        if s.sinr_weights[i] > 0.0 {
            let j = 1 - i;
            ratios.push(Ratio {
                block: i,
                numerator: arc(&s.h[i][i]),
                terms: vec![DenomTerm { block: j, coeff: arc(&s.h[i][j]) }],
                regularizer: s.user_noise[i],
            });
            weights.push(s.sinr_weights[i]);
        }
    }
    let m = s.tx_antennas();
    RatioProblem::new(vec![m, m], 1, ratios, weights, vec![ConstraintSpec::Ball { radius_sq: s.power }; 2])
}

/// Runs `id` on the compiled problem from the given (or seeded random) precoders.
pub fn solve_isac(
    s: &IsacScenario,
    id: SolverId,
    start: Option<&Iterate<f64>>,
    opts: &SolverOptions,
) -> Result<ConvergenceTrace<f64>> {
    let p = compile_isac(s)?;
    let x0 = match start {
        Some(x) => x.clone(),
        None => s.random_precoders(opts.seed),
    };
    run(&p, &x0, id, opts)
}

/// Receivers `(y_r, y₁, y₂)` maximizing the quadratic transform at `v`.
fn receivers(s: &IsacScenario, v: &Iterate<f64>) -> Result<[CMat<f64>; 3]> {
    let cov = |noise: f64, b: &CMat<f64>, x: &CMat<f64>| -> Result<_> {
        let bx = b.matmul(x);
        Hermitian::new(CMat::identity(bx.rows()).scale(noise).add(&bx.matmul(&bx.adjoint())))?.factor()
    };
    let yr = cov(s.radar_noise, &s.g, &v[1])?.solve(&s.a_dot.matmul(&v[0]));
    let y1 = cov(s.user_noise[0], &s.h[0][1], &v[1])?.solve(&s.h[0][0].matmul(&v[0]));
    let y2 = cov(s.user_noise[1], &s.h[1][0], &v[0])?.solve(&s.h[1][1].matmul(&v[1]));
    Ok([yr, y1, y2])
}

/// Per-precoder curvature `D_i` and linear term `c_i` for fixed receivers.
fn curvature_and_targets(s: &IsacScenario, y: &[CMat<f64>; 3]) -> ([Hermitian<f64>; 2], [CMat<f64>; 2]) {
    let [yr, y1, y2] = y;
    let [w1, w2] = s.sinr_weights;
    let m = s.tx_antennas();
    let mut d1 = CMat::zeros(m, m);
    d1.add_gram(&s.h[1][0].adj_mul(y2), w2);
    let mut d2 = CMat::zeros(m, m);
    d2.add_gram(&s.g.adj_mul(yr), s.alpha);
    d2.add_gram(&s.h[0][1].adj_mul(y1), w1);
    let mut c1 = s.a_dot.adj_mul(yr).scale(s.alpha);
    c1.axpy(w1, &s.h[0][0].adj_mul(y1));
    let c2 = s.h[1][1].adj_mul(y2).scale(w2);
    let herm = |d: CMat<f64>| Hermitian::new(d).expect("Gram sums are Hermitian");
    ([herm(d1), herm(d2)], [c1, c2])
}

/// Closed-form update `v_i = (η_i I + D_i)⁻¹ c_i` written for this scenario.
pub fn isac_step_conventional(s: &IsacScenario, v: &Iterate<f64>, bisection_tol: f64) -> Result<Iterate<f64>> {
    let y = receivers(s, v)?;
    let (ds, cs) = curvature_and_targets(s, &y);
    let mut out = Vec::with_capacity(2);
    for i in 0..2 {
        out.push(regularized_inverse_bisection(&ds[i], &cs[i], s.power, bisection_tol)?.0);
    }
    Ok(Blocks(out))
}

/// Inverse-free update `v_i = P(z_i + (c_i − D_i z_i)/λ_i)` written for this scenario.
pub fn isac_step_nonhomogeneous(s: &IsacScenario, v: &Iterate<f64>, mode: SpectralMode) -> Result<Iterate<f64>> {
    let y = receivers(s, v)?;
    let (ds, cs) = curvature_and_targets(s, &y);
    let mut out = Vec::with_capacity(2);
    for i in 0..2 {
        let lam = spectral_upper_bound(&ds[i], mode)?;
        let mut dir = cs[i].clone();
        dir.axpy(-1.0, &ds[i].matrix().matmul(&v[i]));
        let hat = if lam > 0.0 {
            let mut h = v[i].clone();
            h.axpy(1.0 / lam, &dir);
            h
        } else {
            v[i].clone()
        };
        out.push(project_ball(&hat, s.power));
    }
    Ok(Blocks(out))
}

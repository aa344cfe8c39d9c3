//! Multi-cell downlink with `Q` users per cell on a wrapped seven-cell layout.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::geometry::{db_to_linear, dbm_to_watts, mimo_path_loss_db, shadowing_db, HexLayout};
use crate::error::{FpError, Result};
use crate::linalg::{CMat, ConstraintSpec, Hermitian};
use crate::logfp::{log_objective, run_log, LogFpProblem};
use crate::model::random::{complex_gaussian, seeded_rng};
use crate::model::{Blocks, DenomTerm, Iterate, Ratio, RatioProblem};
use crate::solvers::{ConvergenceTrace, SolverId, SolverOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MimoParams {
    /// Number of cells in use (the first `cells` sites of the cluster, at most 7).
    pub cells: usize,
    pub users_per_cell: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub isd_km: f64,
    pub power_dbm: f64,
    pub noise_dbm: f64,
    pub shadowing_std_db: f64,
    /// Minimum user distance from its site.
    pub guard_km: f64,
    /// Rate weight shared by every user.
    pub weight: f64,
    /// Per-user weights in block order; overrides `weight` when present.
    pub user_weights: Option<Vec<f64>>,
}

impl Default for MimoParams {
    fn default() -> Self {
        Self {
            cells: 7,
            users_per_cell: 6,
            tx_antennas: 128,
            rx_antennas: 4,
            isd_km: 0.8,
            power_dbm: 20.0,
            noise_dbm: -90.0,
            shadowing_std_db: 8.0,
            guard_km: 0.01,
            weight: 1.0,
            user_weights: None,
        }
    }
}

impl MimoParams {
    pub fn validate(&self) -> Result<()> {
        if self.cells == 0 || self.cells > HexLayout::CELLS {
            return Err(FpError::InvalidParams(format!("cells must be in 1..=7, got {}", self.cells)));
        }
        if self.users_per_cell == 0 || self.tx_antennas == 0 || self.rx_antennas == 0 {
            return Err(FpError::InvalidParams("user and antenna counts must be positive".into()));
        }
        if self.users_per_cell > self.tx_antennas {
            return Err(FpError::InvalidParams("more users per cell than transmit antennas".into()));
        }
        if !(self.isd_km > 0.0) || !(self.guard_km >= 0.0) || self.guard_km >= self.isd_km / 2.0 {
            return Err(FpError::InvalidParams("need 0 ≤ guard < isd/2 and isd > 0".into()));
        }
        if !(self.weight >= 0.0) || !(self.shadowing_std_db >= 0.0) {
            return Err(FpError::InvalidParams("weight and shadowing std must be nonnegative".into()));
        }
        if let Some(w) = &self.user_weights {
            if w.len() != self.num_users() || w.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                return Err(FpError::InvalidParams(format!(
                    "user_weights needs {} finite nonnegative entries",
                    self.num_users()
                )));
            }
        }
        if self.weights().iter().all(|&w| w == 0.0) {
            return Err(FpError::InvalidParams("at least one user needs a positive weight".into()));
        }
        if !self.power_dbm.is_finite() || !self.noise_dbm.is_finite() {
            return Err(FpError::InvalidParams("power and noise must be finite".into()));
        }
        Ok(())
    }

    pub fn num_users(&self) -> usize {
        self.cells * self.users_per_cell
    }

    /// Rate weight of every user in block order.
    pub fn weights(&self) -> Vec<f64> {
        self.user_weights.clone().unwrap_or_else(|| vec![self.weight; self.num_users()])
    }

    /// Variable block of user `q` in cell `cell`.
    pub fn block(&self, cell: usize, q: usize) -> usize {
        cell * self.users_per_cell + q
    }
}

/// A drawn network: user positions and every BS-to-user channel, in linear units.
#[derive(Clone, Debug, PartialEq)]
pub struct MimoNetwork {
    pub params: MimoParams,
    pub seed: u64,
    pub layout: HexLayout,
    pub users: Vec<[f64; 2]>,
    pub power: f64,
    pub noise: f64,
    /// `channels[u][c]`: BS `c` to user `u` (`N × M`).
    pub channels: Vec<Vec<Arc<CMat<f64>>>>,
    /// Large-scale gain of every `(user, BS)` link.
    pub gains: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl MimoNetwork {
    pub fn generate(params: &MimoParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let mut rng = seeded_rng(seed);
        let layout = HexLayout::new(params.isd_km);
        let q = params.users_per_cell;
        let users: Vec<[f64; 2]> = (0..params.cells)
            .flat_map(|c| (0..q).map(move |_| c))
            .map(|c| layout.sample_user(c, params.guard_km, &mut rng))
            .collect();
        let mut gains = Vec::with_capacity(users.len());
        let mut channels = Vec::with_capacity(users.len());
        for u in &users {
            let mut g_row = Vec::with_capacity(params.cells);
            let mut h_row = Vec::with_capacity(params.cells);
            for c in 0..params.cells {
                let d = layout.wrapped_distance(*u, layout.site(c)).max(params.guard_km.max(1e-3));
                let loss = mimo_path_loss_db(d) + shadowing_db(params.shadowing_std_db, &mut rng);
                let gain = db_to_linear(-loss);
                let h = complex_gaussian::<f64, _>(&mut rng, params.rx_antennas, params.tx_antennas).scale(gain.sqrt());
                g_row.push(gain);
                h_row.push(Arc::new(h));
            }
            gains.push(g_row);
            channels.push(h_row);
        }
        Ok(Self {
            params: params.clone(),
            seed,
            layout,
            users,
            power: dbm_to_watts(params.power_dbm),
            noise: dbm_to_watts(params.noise_dbm),
            channels,
            gains,
            weights: params.weights(),
        })
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    fn serving_cell(&self, u: usize) -> usize {
        u / self.params.users_per_cell
    }

    /// Gaussian precoders, each cell scaled to its full budget.
    pub fn random_precoders(&self, seed: u64) -> Iterate<f64> {
        let mut rng = seeded_rng(seed);
        let q = self.params.users_per_cell;
        let mut blocks: Vec<CMat<f64>> =
            (0..self.num_users()).map(|_| complex_gaussian(&mut rng, self.params.tx_antennas, 1)).collect();
        for cell in blocks.chunks_mut(q) {
            let total: f64 = cell.iter().map(CMat::norm_sq).sum();
            let f = (self.power / total).sqrt();
            cell.iter_mut().for_each(|b| b.scale_mut(f));
        }
        Blocks(blocks)
    }
}

/// SINR of user `q` in cell `cell`: `sᴴ (σ² I + Σ_{others} H v vᴴ Hᴴ)⁻¹ s` with `s = H v_own`.
pub fn mimo_sinr(net: &MimoNetwork, v: &Iterate<f64>, cell: usize, q: usize) -> Result<f64> {
    if cell >= net.params.cells || q >= net.params.users_per_cell {
        return Err(FpError::Dimension(format!("no user {q} in cell {cell}")));
    }
    let u = net.params.block(cell, q);
    let n = net.params.rx_antennas;
    let mut cov = CMat::identity(n).scale(net.noise);
    for w in 0..net.num_users() {
        if w != u {
            let hv = net.channels[u][net.serving_cell(w)].matmul(&v[w]);
            cov.add_gram(&hv, 1.0);
        }
    }
    let sig = net.channels[u][net.serving_cell(u)].matmul(&v[u]);
    let sol = Hermitian::new(cov)?.factor()?.solve(&sig);
    Ok(sig.inner(&sol).re)
}

/// Weighted sum rate `Σ_u μ ln(1 + SINR_u)` in nats, evaluated directly.
pub fn mimo_sum_rate(net: &MimoNetwork, v: &Iterate<f64>) -> Result<f64> {
    let q = net.params.users_per_cell;
    let mut total = 0.0;
    for u in 0..net.num_users() {
        if net.weights[u] > 0.0 {
            total += net.weights[u] * mimo_sinr(net, v, u / q, u % q)?.ln_1p();
        }
    }
    Ok(total)
}

/// One ratio per user with positive weight, all other users as interference, a shared
/// budget per cell.
pub fn compile_mimo(net: &MimoNetwork) -> Result<LogFpProblem<f64>> {
    let k = net.num_users();
    let q = net.params.users_per_cell;
    let active: Vec<usize> = (0..k).filter(|&u| net.weights[u] > 0.0).collect();
    let ratios = active
        .iter()
        .map(|&u| Ratio {
            block: u,
            numerator: Arc::clone(&net.channels[u][net.serving_cell(u)]),
            terms: (0..k)
                .filter(|&w| w != u)
                .map(|w| DenomTerm {
                    block: w,
                    coeff: Arc::clone(&net.channels[u][net.serving_cell(w)]),
                })
                .collect(),
            regularizer: net.noise,
        })
        .collect();
    let constraints = (0..k)
        .map(|u| {
            let first = net.serving_cell(u) * q;
            ConstraintSpec::GroupBall {
                members: (first..first + q).collect(),
                radius_sq: net.power,
            }
        })
        .collect();
    let base = RatioProblem::new(
        vec![net.params.tx_antennas; k],
        1,
        ratios,
        active.iter().map(|&u| net.weights[u]).collect(),
        constraints,
    )?;
    LogFpProblem::new(base)
}

/// Runs a log solver on the compiled network; the objective is the weighted sum rate in nats.
pub fn solve_mimo(
    net: &MimoNetwork,
    id: SolverId,
    start: Option<&Iterate<f64>>,
    opts: &SolverOptions,
) -> Result<ConvergenceTrace<f64>> {
    let p = compile_mimo(net)?;
    let x0 = match start {
        Some(x) => x.clone(),
        None => net.random_precoders(opts.seed),
    };
    run_log(&p, &x0, id, opts)
}

/// Sum rate of the compiled problem; equals [`mimo_sum_rate`] up to rounding.
pub fn compiled_sum_rate(p: &LogFpProblem<f64>, v: &Iterate<f64>) -> Result<f64> {
    log_objective(p, v)
}

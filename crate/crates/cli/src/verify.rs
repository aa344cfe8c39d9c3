//! Property suites run by `fracopt verify`: each compares a library result against an
//! independent route over seeded random cases.

use fracopt::linalg::{regularized_inverse_bisection, CMat, Hermitian, SpectralMode};
use fracopt::logfp::{
    dual_transform_surrogate, log_objective, optimal_t, random_interference, step_generalized, step_wmmse_classic, Inner,
    LogFpProblem,
};
use fracopt::model::random::{complex_gaussian, random_problem, random_start, seeded_rng, InstanceParams};
use fracopt::model::{dmats, evaluate, f_q, f_t, gradient, Blocks, Iterate, RatioProblem};
use fracopt::solvers::{step_constants, step_nonhomogeneous};
use fracopt::testkit::{eta_grid_subproblem, finite_difference_gradient, naive_ratios, subproblem_value};
use fracopt::wireless::{
    compile_isac, compile_mimo, isac_objective, mimo_sum_rate, IsacParams, IsacScenario, MimoNetwork, MimoParams,
};
use rand::Rng;
use serde::Serialize;

use crate::error::BenchError;
use crate::seeds::child_seed;

pub const SUITES: [&str; 7] = ["sandwich", "dual", "gradient", "gp", "wmmse", "compile", "bisection"];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: usize,
    pub failures: usize,
    /// Largest observed error divided by its tolerance.
    pub worst_ratio: f64,
    pub messages: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        Self { suite: suite.to_string(), checks: 0, failures: 0, worst_ratio: 0.0, messages: Vec::new() }
    }

    /// Records `err ≤ tol`.
    fn check(&mut self, err: f64, tol: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        let ratio = if err.is_nan() { f64::INFINITY } else { err / tol };
        self.worst_ratio = self.worst_ratio.max(ratio);
        if !(err <= tol) {
            self.failures += 1;
            if self.messages.len() < 5 {
                self.messages.push(format!("{} (error {err:.3e}, tolerance {tol:.1e})", what()));
            }
        }
    }

    fn fail(&mut self, what: String) {
        self.checks += 1;
        self.failures += 1;
        self.worst_ratio = f64::INFINITY;
        if self.messages.len() < 5 {
            self.messages.push(what);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

/// Number of cases each suite uses when run from the command line.
#[derive(Clone, Copy, Debug)]
pub struct SuiteSizes {
    pub sandwich: usize,
    pub dual: usize,
    pub gradient: usize,
    pub gp_instances: usize,
    pub gp_iterations: usize,
    pub wmmse: usize,
    pub compile: usize,
    pub bisection: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        Self {
            sandwich: 1000,
            dual: 500,
            gradient: 20,
            gp_instances: 20,
            gp_iterations: 50,
            wmmse: 10,
            compile: 100,
            bisection: 50,
        }
    }
}

/// Runs one suite by name.
pub fn run_suite(name: &str, seed: u64, sizes: &SuiteSizes) -> Result<SuiteReport, BenchError> {
    let seed = child_seed(seed, SUITES.iter().position(|s| *s == name).unwrap_or(usize::MAX) as u64);
    match name {
        "sandwich" => Ok(sandwich(seed, sizes.sandwich)),
        "dual" => Ok(dual(seed, sizes.dual)),
        "gradient" => Ok(gradient_fd(seed, sizes.gradient)),
        "gp" => Ok(gradient_projection(seed, sizes.gp_instances, sizes.gp_iterations)),
        "wmmse" => Ok(wmmse(seed, sizes.wmmse)),
        "compile" => Ok(compile(seed, sizes.compile)),
        "bisection" => Ok(bisection(seed, sizes.bisection)),
        _ => Err(BenchError::Usage(format!("unknown suite `{name}`; known: {}", SUITES.join(", ")))),
    }
}

/// Runs the named suite, or all of them when `name` is `None` or empty.
pub fn cmd_verify(name: Option<&str>, seed: u64, sizes: &SuiteSizes) -> Result<Vec<SuiteReport>, BenchError> {
    match name.filter(|n| !n.is_empty()) {
        Some(n) => Ok(vec![run_suite(n, seed, sizes)?]),
        None => SUITES.iter().map(|n| run_suite(n, seed, sizes)).collect(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn small_instance(seed: u64, max_n: usize, max_d: usize) -> (RatioProblem<f64>, Iterate<f64>) {
    let mut rng = seeded_rng(seed);
    let params = InstanceParams {
        n: rng.random_range(1..=max_n),
        d: rng.random_range(1..=max_d),
        ell: rng.random_range(1..=4),
        m: rng.random_range(1..=3),
        ..InstanceParams::default()
    };
    let p = random_problem(&params, &mut rng).expect("valid parameters");
    let x = random_start(&p, &mut rng);
    (p, x)
}

fn small_network(seed: u64) -> (LogFpProblem<f64>, Iterate<f64>) {
    let mut rng = seeded_rng(seed);
    let users = rng.random_range(1..=4);
    let tx = rng.random_range(1..=4);
    let rx = rng.random_range(1..=3);
    let p = random_interference(users, tx, rx, 0.5, 2.0, &mut rng).expect("valid network");
    let x = random_start(p.base(), &mut rng);
    (p, x)
}

/// `f_t ≤ f_q ≤ f_o` at arbitrary auxiliaries, with equality at the optimal ones.
pub fn sandwich(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("sandwich");
    for c in 0..count {
        let s = child_seed(seed, c as u64);
        let (p, x) = small_instance(s, 4, 5);
        let mut rng = seeded_rng(child_seed(s, 1));
        let z = random_start(&p, &mut rng);
        let ev = match evaluate(&p, &x) {
            Ok(e) => e,
            Err(e) => {
                rep.fail(format!("case {c}: {e}"));
                continue;
            }
        };
        let y = Blocks(ev.y.iter().map(|b| b.add(&complex_gaussian::<f64, _>(&mut rng, b.rows(), b.cols()))).collect());
        let lams = step_constants(p.groups(), &dmats(&p, &y), SpectralMode::Frobenius).expect("finite matrices");
        let (fo, fq, ft) = (ev.objective, f_q(&p, &x, &y), f_t(&p, &x, &y, &z, &lams));
        let scale = fo.abs().max(1.0);
        rep.check(((ft - fq) / scale).max(0.0), 1e-9, || format!("case {c}: f_t {ft} > f_q {fq}"));
        rep.check(((fq - fo) / scale).max(0.0), 1e-9, || format!("case {c}: f_q {fq} > f_o {fo}"));
        let fq_star = f_q(&p, &x, &ev.y);
        rep.check(rel(fq_star, fo), 1e-9, || format!("case {c}: f_q(y*) {fq_star} vs f_o {fo}"));
        let lams_star = step_constants(p.groups(), &dmats(&p, &ev.y), SpectralMode::Frobenius).expect("finite");
        let ft_star = f_t(&p, &x, &ev.y, &x, &lams_star);
        rep.check(rel(ft_star, fo), 1e-9, || format!("case {c}: f_t(y*, z = x) {ft_star} vs f_o {fo}"));
    }
    rep
}

/// Lagrangian dual transform: tight at `t = t*(x)`, a lower bound elsewhere, and `t*` equals the ratios.
pub fn dual(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("dual");
    for c in 0..count {
        let s = child_seed(seed, c as u64);
        let (p, x) = small_network(s);
        let (Ok(t), Ok(g)) = (optimal_t(&p, &x), log_objective(&p, &x)) else {
            rep.fail(format!("case {c}: evaluation failed"));
            continue;
        };
        let naive = naive_ratios(p.base(), &x);
        let t_err = t.iter().zip(&naive).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
        rep.check(t_err, 1e-10, || format!("case {c}: t* differs from the ratios"));
        let h = dual_transform_surrogate(&p, &x, &t).expect("valid t");
        rep.check(rel(h, g), 1e-10, || format!("case {c}: h(x, t*) {h} vs {g}"));
        let mut rng = seeded_rng(child_seed(s, 2));
        let other: Vec<f64> = t.iter().map(|_| rng.random_range(0.0..10.0)).collect();
        let h2 = dual_transform_surrogate(&p, &x, &other).expect("valid t");
        rep.check(((h2 - g) / g.abs().max(1.0)).max(0.0), 1e-10, || format!("case {c}: h(x, t) {h2} > {g}"));
    }
    rep
}

/// Closed-form gradient against central finite differences of the objective.
pub fn gradient_fd(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("gradient");
    for c in 0..count {
        let (p, x) = small_instance(child_seed(seed, c as u64), 3, 5);
        let g = gradient(&p, &x).expect("gradient");
        let fd = finite_difference_gradient(|z| evaluate(&p, z).expect("objective").objective, &x, 1e-5);
        let err = g.sub(&fd).norm() / fd.norm().max(1e-300);
        rep.check(err, 1e-6, || format!("case {c}: relative gradient error"));
    }
    rep
}

/// Nonhomogeneous steps equal projected gradient steps with stepsize `1/(2λ)`; for log-FP the
/// composite step uses a finite-difference gradient of the sum rate.
pub fn gradient_projection(seed: u64, instances: usize, iterations: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("gp");
    for c in 0..instances {
        let (p, mut x) = small_instance(child_seed(seed, c as u64), 4, 6);
        for k in 0..iterations {
            let ev = evaluate(&p, &x).expect("objective");
            let lams = step_constants(p.groups(), &dmats(&p, &ev.y), SpectralMode::Frobenius).expect("finite");
            let g = gradient(&p, &x).expect("gradient");
            let moved = Blocks(
                x.iter()
                    .zip(g.iter())
                    .zip(&lams)
                    .map(|((xb, gb), &l)| {
                        let mut v = xb.clone();
                        v.axpy(0.5 / l, gb);
                        v
                    })
                    .collect(),
            );
            let explicit = p.project(&moved);
            let step = step_nonhomogeneous(&p, &x, SpectralMode::Frobenius).expect("step");
            let scale = explicit.iter().map(CMat::max_abs).fold(1.0, f64::max);
            rep.check(step.max_abs_diff(&explicit) / scale, 1e-10, || format!("instance {c}, iteration {k}"));
            x = step;
        }
    }
    for c in 0..instances.min(10) {
        let (p, x) = small_network(child_seed(seed ^ 0x5eed, c as u64));
        let next = step_generalized(&p, &x, Inner::Nonhomogeneous, None, SpectralMode::Frobenius, 1e-12).expect("step");
        let t = optimal_t(&p, &x).expect("ratios");
        let weighted = p.weighted_hat(&t).expect("weights");
        let y = evaluate(&weighted, &x).expect("objective").y;
        let lams = step_constants(weighted.groups(), &dmats(&weighted, &y), SpectralMode::Frobenius).expect("finite");
        let fd = finite_difference_gradient(|z| log_objective(&p, z).expect("rate"), &x, 1e-5);
        let manual = p.base().project(&Blocks(
            x.iter()
                .zip(fd.iter())
                .zip(&lams)
                .map(|((xb, gb), &l)| {
                    let mut v = xb.clone();
                    v.axpy(0.5 / l, gb);
                    v
                })
                .collect(),
        ));
        rep.check(next.max_abs_diff(&manual), 1e-8, || format!("log network {c}"));
    }
    rep
}

/// Classic WMMSE and the generalized conventional method produce the same iterates.
pub fn wmmse(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("wmmse");
    let params = MimoParams { cells: 2, users_per_cell: 2, tx_antennas: 6, rx_antennas: 2, ..MimoParams::default() };
    for c in 0..count {
        let s = child_seed(seed, c as u64);
        let net = MimoNetwork::generate(&params, s).expect("valid network");
        let p = compile_mimo(&net).expect("compiles");
        let mut a = net.random_precoders(child_seed(s, 1));
        let mut b = a.clone();
        for k in 0..30 {
            a = step_wmmse_classic(&p, &a, 1e-12).expect("wmmse step");
            b = step_generalized(&p, &b, Inner::Conventional, None, SpectralMode::Frobenius, 1e-12).expect("step");
            let scale = a.iter().map(CMat::max_abs).fold(f64::MIN_POSITIVE, f64::max);
            rep.check(a.max_abs_diff(&b) / scale, 1e-9, || format!("network {c}, iteration {k}"));
        }
    }
    rep
}

/// Compiled ISAC and MIMO objectives against the direct formulas.
pub fn compile(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("compile");
    let isac = IsacParams { tx_antennas: 8, user_antennas: 2, radar_antennas: 8, ..IsacParams::default() };
    let s = IsacScenario::generate(&isac, seed).expect("valid scenario");
    let p = compile_isac(&s).expect("compiles");
    for c in 0..count {
        let v = s.random_precoders(child_seed(seed, c as u64));
        let direct = isac_objective(&s, &v).expect("direct");
        let compiled = evaluate(&p, &v).expect("compiled").objective;
        rep.check(rel_strict(direct, compiled), 1e-10, || format!("isac precoder {c}: {direct} vs {compiled}"));
    }
    let mimo = MimoParams { cells: 3, users_per_cell: 2, tx_antennas: 8, rx_antennas: 2, ..MimoParams::default() };
    let net = MimoNetwork::generate(&mimo, seed).expect("valid network");
    let lp = compile_mimo(&net).expect("compiles");
    for c in 0..count {
        let v = net.random_precoders(child_seed(seed ^ 1, c as u64));
        let direct = mimo_sum_rate(&net, &v).expect("direct");
        let compiled = log_objective(&lp, &v).expect("compiled");
        rep.check(rel_strict(direct, compiled), 1e-10, || format!("mimo precoder {c}: {direct} vs {compiled}"));
    }
    rep
}

fn rel_strict(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Multiplier search against a dense η-grid in subproblem objective.
pub fn bisection(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("bisection");
    for c in 0..count {
        let mut rng = seeded_rng(child_seed(seed, c as u64));
        let n = rng.random_range(1..=5);
        let rank = rng.random_range(0..=n);
        let g = complex_gaussian::<f64, _>(&mut rng, n, rank.max(1));
        let d = if rank == 0 { CMat::zeros(n, n) } else { g.mul_adj(&g) };
        let target = complex_gaussian::<f64, _>(&mut rng, n, 1);
        let radius_sq = rng.random_range(0.05..5.0);
        let (x, _) = regularized_inverse_bisection(&Hermitian::new(d.clone()).expect("Gram"), &target, radius_sq, 1e-12)
            .expect("bracketed");
        let mine = subproblem_value(&d, &target, &x);
        let grid = eta_grid_subproblem(&d, &target, radius_sq, 0.0, 10_000);
        rep.check(rel(mine, grid), 1e-6, || format!("case {c}: bisection {mine} vs grid {grid}"));
        rep.check(((x.norm_sq() - radius_sq) / radius_sq).max(0.0), 1e-12, || format!("case {c}: infeasible"));
    }
    rep
}

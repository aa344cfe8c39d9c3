//! End-to-end acceptance suite: runs every criterion in sequence and prints one PASS/FAIL
//! line each. Runs as a plain binary so timing criteria never share the CPU with other tests.

use std::process::ExitCode;
use std::time::Instant;

use fracopt::model::random::{random_problem, random_start, seeded_rng, InstanceParams};
use fracopt::model::{Iterate, RatioProblem};
use fracopt::solvers::{extrapolation_ratio, run, write_csv, ConvergenceTrace, SolverId, SolverOptions};
use fracopt::wireless::{solve_isac, solve_mimo, IsacParams, IsacScenario, MimoNetwork, MimoParams};
use fracopt_bench::rates::fit_rate;
use fracopt_bench::seeds::child_seed;
use fracopt_bench::verify::{self, SuiteReport};
use fracopt_bench::{cmd_rates, FStar};
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }

    fn from_suites(reports: &[SuiteReport]) -> Self {
        let pass = reports.iter().all(SuiteReport::passed);
        let detail = reports
            .iter()
            .map(|r| {
                let mut s = format!("{}: {} checks, {} failed, worst err/tol {:.2e}", r.suite, r.checks, r.failures, r.worst_ratio);
                if let Some(m) = r.messages.first() {
                    s.push_str(&format!(" [{m}]"));
                }
                s
            })
            .collect::<Vec<_>>()
            .join("; ");
        Self { pass, detail }
    }
}

const SEED: u64 = 20_240_601;

fn baseline_family() -> InstanceParams {
    InstanceParams::default()
}

fn instance(params: &InstanceParams, seed: u64) -> (RatioProblem<f64>, Iterate<f64>) {
    let mut rng = seeded_rng(seed);
    let p = random_problem(params, &mut rng).expect("valid parameters");
    let x0 = random_start(&p, &mut rng);
    (p, x0)
}

fn exhaustive(max_iters: usize) -> SolverOptions {
    SolverOptions { max_iters, rel_obj_tol: f64::MIN_POSITIVE, record_wall_time: false, ..SolverOptions::default() }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn largest_drop(tr: &ConvergenceTrace<f64>) -> f64 {
    let mut prev = tr.initial_objective;
    let mut worst: f64 = 0.0;
    for f in tr.objectives() {
        worst = worst.max((prev - f) / prev.abs().max(f64::MIN_POSITIVE));
        prev = f;
    }
    worst
}

fn mm_monotonicity() -> Outcome {
    let drops: Vec<(f64, f64)> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let (p, x0) = instance(&baseline_family(), child_seed(SEED, i));
            let a1 = run(&p, &x0, SolverId::Conventional, &exhaustive(500)).expect("conventional");
            let a2 = run(&p, &x0, SolverId::Nonhomogeneous, &exhaustive(500)).expect("nonhomogeneous");
            assert_eq!((a1.iterations(), a2.iterations()), (500, 500));
            (largest_drop(&a1), largest_drop(&a2))
        })
        .collect();
    let w1 = drops.iter().map(|d| d.0).fold(0.0, f64::max);
    let w2 = drops.iter().map(|d| d.1).fold(0.0, f64::max);
    Outcome::new(
        w1 <= 1e-9 && w2 <= 1e-9,
        format!("100 instances x 500 iterations; largest relative decrease alg1 {w1:.2e}, alg2 {w2:.2e}"),
    )
}

fn gradient_projection() -> Outcome {
    Outcome::from_suites(&[verify::gradient_projection(child_seed(SEED, 2), 20, 50)])
}

fn gradient_vs_finite_differences() -> Outcome {
    Outcome::from_suites(&[verify::gradient_fd(child_seed(SEED, 3), 20)])
}

fn sandwich_and_tightness() -> Outcome {
    Outcome::from_suites(&[verify::sandwich(child_seed(SEED, 4), 1000), verify::dual(child_seed(SEED, 41), 500)])
}

fn wmmse_equivalence() -> Outcome {
    Outcome::from_suites(&[verify::wmmse(child_seed(SEED, 5), 10)])
}

fn iterations_to_limit(tr: &ConvergenceTrace<f64>) -> usize {
    let lim = tr.final_objective();
    tr.records
        .iter()
        .position(|r| (lim - r.objective).abs() <= 1e-6 * lim.abs())
        .map_or(tr.iterations(), |k| k + 1)
}

fn iteration_ordering() -> Outcome {
    let counts: Vec<(usize, usize)> = (0..15u64)
        .into_par_iter()
        .map(|i| {
            let (p, x0) = instance(&baseline_family(), child_seed(SEED ^ 6, i));
            let a1 = run(&p, &x0, SolverId::Conventional, &exhaustive(3000)).expect("conventional");
            let a2 = run(&p, &x0, SolverId::Nonhomogeneous, &exhaustive(3000)).expect("nonhomogeneous");
            (iterations_to_limit(&a1), iterations_to_limit(&a2))
        })
        .collect();
    let m1 = median(counts.iter().map(|c| c.0 as f64).collect());
    let m2 = median(counts.iter().map(|c| c.1 as f64).collect());
    Outcome::new(m1 <= m2, format!("median iterations to within 1e-6 of own limit (budget 3000): alg1 {m1}, alg2 {m2}"))
}

fn mean_iteration_time(tr: &ConvergenceTrace<f64>) -> f64 {
    tr.mean_iteration_time()
}

fn time_ordering() -> Outcome {
    let timed = SolverOptions { max_iters: 30, rel_obj_tol: f64::MIN_POSITIVE, ..SolverOptions::default() };
    let params = InstanceParams { d: 64, ..baseline_family() };
    let (mut t1, mut t2) = (0.0, 0.0);
    for i in 0..10u64 {
        let (p, x0) = instance(&params, child_seed(SEED ^ 7, i));
        t1 += mean_iteration_time(&run(&p, &x0, SolverId::Conventional, &timed).expect("conventional"));
        t2 += mean_iteration_time(&run(&p, &x0, SolverId::Nonhomogeneous, &timed).expect("nonhomogeneous"));
    }
    let mimo = MimoParams { cells: 3, users_per_cell: 2, tx_antennas: 64, rx_antennas: 2, ..MimoParams::default() };
    let (mut tw, mut tg) = (0.0, 0.0);
    for i in 0..10u64 {
        let net = MimoNetwork::generate(&mimo, child_seed(SEED ^ 71, i)).expect("network");
        let x0 = net.random_precoders(i);
        tw += mean_iteration_time(&solve_mimo(&net, SolverId::WmmseClassic, Some(&x0), &timed).expect("wmmse"));
        tg += mean_iteration_time(
            &solve_mimo(&net, SolverId::GeneralizedNonhomogeneous, Some(&x0), &timed).expect("generalized"),
        );
    }
    let (t1, t2, tw, tg) = (t1 / 10.0, t2 / 10.0, tw / 10.0, tg / 10.0);
    Outcome::new(
        t2 < t1 && tg < tw,
        format!(
            "mean s/iteration over 30 iterations x 10 runs: d=64 alg1 {t1:.3e}, alg2 {t2:.3e}; \
             mimo wmmse_classic {tw:.3e}, generalized_nonhomogeneous {tg:.3e}"
        ),
    )
}

fn acceleration_ordering() -> Outcome {
    let synthetic = [(1usize..=300).map(|k| (k, 5.0 - 1.0 / k as f64)).collect::<Vec<_>>(), (1usize..=300)
        .map(|k| (k, 5.0 - 1.0 / (k * k) as f64))
        .collect()];
    let s1 = fit_rate(&synthetic[0], 5.0, 1).map(|f| f.slope).unwrap_or(f64::NAN);
    let s2 = fit_rate(&synthetic[1], 5.0, 1).map(|f| f.slope).unwrap_or(f64::NAN);
    let machinery = (s1 + 1.0).abs() <= 1e-6 && (s2 + 2.0).abs() <= 1e-6;

    let dir = tempfile::tempdir().expect("temporary directory");
    let slopes: Vec<Option<(f64, f64)>> = (0..11u64)
        .into_par_iter()
        .map(|i| {
            let (p, x0) = instance(&baseline_family(), child_seed(SEED ^ 8, i));
            // Start near convergence: a short run of the closed-form method.
            let warm = run(&p, &x0, SolverId::Conventional, &exhaustive(30)).expect("warm start").final_iterate;
            let a2 = run(&p, &warm, SolverId::Nonhomogeneous, &exhaustive(300)).expect("nonhomogeneous");
            let a3 = run(&p, &warm, SolverId::Extrapolated, &exhaustive(300)).expect("extrapolated");
            let reference = run(&p, &warm, SolverId::Conventional, &exhaustive(3000)).expect("reference");
            let f_star = reference.final_objective().max(a2.final_objective()).max(a3.final_objective());
            let files: Vec<_> = [(&a2, "alg2"), (&a3, "alg3")]
                .iter()
                .map(|(tr, name)| {
                    let path = dir.path().join(format!("run_{i}_{name}.csv"));
                    std::fs::write(&path, write_csv(&tr.records)).expect("write trace");
                    path
                })
                .collect();
            let fits = cmd_rates(&files, FStar::Value(f_star), 1).ok()?;
            Some((fits[0].1.slope, fits[1].1.slope))
        })
        .collect();
    let fitted: Vec<(f64, f64)> = slopes.iter().flatten().copied().collect();
    if fitted.is_empty() {
        return Outcome::new(false, "no trace could be fitted");
    }
    let m2 = median(fitted.iter().map(|s| s.0).collect());
    let m3 = median(fitted.iter().map(|s| s.1).collect());
    Outcome::new(
        machinery && m3 <= m2,
        format!(
            "power-law fits {s1:.9}, {s2:.9}; median fitted slope over {} warm-started instances: alg2 {m2:.3}, alg3 {m3:.3}",
            fitted.len()
        ),
    )
}

fn closed_form_fixed_points() -> Outcome {
    let params = MimoParams { cells: 1, users_per_cell: 1, tx_antennas: 4, rx_antennas: 1, ..MimoParams::default() };
    let net = MimoNetwork::generate(&params, child_seed(SEED, 9)).expect("network");
    let h = &net.channels[0][0];
    let matched = h.adjoint().scale((net.power / h.norm_sq()).sqrt());
    let rate = (net.power * h.norm_sq() / net.noise).ln_1p();
    let opts = SolverOptions { max_iters: 20_000, rel_obj_tol: 1e-15, ..SolverOptions::default() };
    let tr = solve_mimo(&net, SolverId::WmmseClassic, None, &opts).expect("solve");
    let v = &tr.final_iterate[0];
    let phase = matched.inner(v);
    let aligned = v.cscale(phase.conj() / phase.norm());
    let beam_err = aligned.sub(&matched).frobenius() / matched.frobenius();
    let rate_err = (tr.final_objective() - rate).abs() / rate;
    let etas = [(1, (0, 1)), (3, (1, 4)), (10, (8, 11))];
    let etas_ok = etas.iter().all(|&(k, (n, d))| {
        let r = extrapolation_ratio(k);
        (*r.numer(), *r.denom()) == (n, d)
    });
    Outcome::new(
        beam_err <= 1e-6 && rate_err <= 1e-6 && etas_ok,
        format!(
            "MISO beam error {beam_err:.2e}, rate error {rate_err:.2e} after {} iterations; eta_1, eta_3, eta_10 exact: {etas_ok}",
            tr.iterations()
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    Outcome::from_suites(&[verify::compile(child_seed(SEED, 10), 100), verify::bisection(child_seed(SEED, 101), 100)])
}

fn cross_solver_agreement() -> Outcome {
    let params = IsacParams { tx_antennas: 8, user_antennas: 2, radar_antennas: 8, ..IsacParams::default() };
    let opts = SolverOptions { max_iters: 2000, rel_obj_tol: 1e-13, ..SolverOptions::default() };
    let gaps: Vec<f64> = (0..20u64)
        .into_par_iter()
        .map(|i| {
            let seed = child_seed(SEED ^ 11, i);
            let s = IsacScenario::generate(&params, seed).expect("scenario");
            let x0 = s.random_precoders(child_seed(seed, 1));
            let finals: Vec<f64> = [SolverId::Conventional, SolverId::Nonhomogeneous, SolverId::Extrapolated]
                .iter()
                .map(|&id| solve_isac(&s, id, Some(&x0), &opts).expect("solve").final_objective())
                .collect();
            let best = finals.iter().copied().fold(f64::MIN, f64::max);
            finals.iter().map(|f| (best - f) / best.abs()).fold(0.0, f64::max)
        })
        .collect();
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    Outcome::new(worst <= 1e-3, format!("20 scenarios; largest relative shortfall from the best solver {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("MM monotonicity", mm_monotonicity),
        ("gradient-projection equivalence", gradient_projection),
        ("gradient vs finite differences", gradient_vs_finite_differences),
        ("surrogate sandwich and tightness", sandwich_and_tightness),
        ("WMMSE equivalence", wmmse_equivalence),
        ("iteration-count ordering", iteration_ordering),
        ("per-iteration time ordering", time_ordering),
        ("acceleration ordering", acceleration_ordering),
        ("closed-form fixed points", closed_form_fixed_points),
        ("oracle equivalence", oracle_equivalence),
        ("cross-solver agreement", cross_solver_agreement),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        if !out.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<34} {}  ({:.1} s) {}",
            i + 1,
            name,
            if out.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

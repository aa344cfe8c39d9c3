use num_rational::Ratio;

use super::*;
use crate::linalg::{CMat, ConstraintSpec, SpectralMode};
use crate::model::random::{random_problem, random_start, seeded_rng, InstanceParams};
use crate::model::{self, Blocks, Iterate, RatioProblem};
use crate::testkit;

fn scalar_unit_problem() -> RatioProblem<f64> {
    RatioProblem::dense(
        vec![CMat::column_real(&[1.0])],
        vec![vec![CMat::column_real(&[1.0])]],
        1,
        vec![1.0],
        0.0,
        vec![ConstraintSpec::Unconstrained],
    )
    .unwrap()
}

fn fig2(seed: u64) -> (RatioProblem<f64>, Iterate<f64>) {
    let mut rng = seeded_rng(seed);
    let p = random_problem(&InstanceParams::default(), &mut rng).unwrap();
    let x = random_start(&p, &mut rng);
    (p, x)
}

fn small(seed: u64, radius_sq: Option<f64>) -> (RatioProblem<f64>, Iterate<f64>) {
    let mut rng = seeded_rng(seed);
    let params = InstanceParams {
        n: 3,
        d: 4,
        ell: 2,
        m: 2,
        radius_sq,
        ..InstanceParams::default()
    };
    let p = random_problem(&params, &mut rng).unwrap();
    let x = random_start(&p, &mut rng);
    (p, x)
}

#[test]
fn extrapolation_schedule_values() {
    assert_eq!(extrapolation_ratio(1), Ratio::from_integer(0));
    assert_eq!(extrapolation_ratio(2), Ratio::from_integer(0));
    assert_eq!(extrapolation_ratio(3), Ratio::new(1, 4));
    assert_eq!(extrapolation_ratio(10), Ratio::new(8, 11));
    assert_eq!(extrapolation_step::<f64>(3), 0.25);
    assert_eq!(extrapolation_step::<f64>(10), 8.0 / 11.0);
}

#[test]
fn conventional_fixed_point_on_constant_ratio() {
    let p = scalar_unit_problem();
    let x = Blocks(vec![CMat::column_real(&[1.3])]);
    let next = step_conventional(&p, &x, 1e-10).unwrap();
    assert!((next[0][(0, 0)].re - 1.3).abs() < 1e-10);
}

#[test]
fn conventional_inactive_ball_is_closed_form() {
    let (p, x) = small(1, Some(1e12));
    let next = step_conventional(&p, &x, 1e-10).unwrap();
    let y = model::optimal_y(&p, &x).unwrap();
    let ds = model::dmats(&p, &y);
    let cs = model::numerator_targets(&p, &y);
    for b in 0..p.num_blocks() {
        let expect = testkit::lu_solve(ds[b].matrix(), &cs[b]).unwrap();
        assert!(next[b].max_abs_diff(&expect) < 1e-9 * expect.max_abs().max(1.0));
    }
}

#[test]
fn monotone_steps_on_random_instance() {
    let (p, x0) = fig2(2);
    for id in [SolverId::Conventional, SolverId::Nonhomogeneous] {
        let mut x = x0.clone();
        let mut f = testkit::naive_objective(&p, &x);
        for _ in 0..50 {
            x = match id {
                SolverId::Conventional => step_conventional(&p, &x, 1e-10).unwrap(),
                _ => step_nonhomogeneous(&p, &x, SpectralMode::Frobenius).unwrap(),
            };
            assert!(p.is_feasible(&x, 1e-9));
            let g = testkit::naive_objective(&p, &x);
            assert!(g >= f - 1e-9 * f.abs().max(1.0), "{id}: {f} -> {g}");
            f = g;
        }
    }
}

#[test]
fn nonhomogeneous_is_gradient_projection() {
    for seed in 0..5 {
        let (p, x) = small(seed, Some(1.0));
        for mode in [SpectralMode::Frobenius, SpectralMode::Exact] {
            let next = step_nonhomogeneous(&p, &x, mode).unwrap();
            let y = model::optimal_y(&p, &x).unwrap();
            let lams = step_constants(p.groups(), &model::dmats(&p, &y), mode).unwrap();
            let g = model::gradient(&p, &x).unwrap();
            let manual = p.project(&Blocks(
                (0..p.num_blocks())
                    .map(|b| {
                        let mut v = x[b].clone();
                        v.axpy(0.5 / lams[b], &g[b]);
                        v
                    })
                    .collect(),
            ));
            assert!(next.max_abs_diff(&manual) <= 1e-10, "{}", next.max_abs_diff(&manual));
        }
    }
}

#[test]
fn nonhomogeneous_reproduces_stationary_scalar() {
    let p = scalar_unit_problem();
    let x = Blocks(vec![CMat::column_real(&[0.7])]);
    let next = step_nonhomogeneous(&p, &x, SpectralMode::Frobenius).unwrap();
    assert!((next[0][(0, 0)].re - 0.7).abs() < 1e-14);
}

#[test]
fn extrapolated_step_special_cases() {
    let (p, x0) = small(3, Some(1.0));
    let x1 = step_nonhomogeneous(&p, &x0, SpectralMode::Frobenius).unwrap();
    let plain = step_nonhomogeneous(&p, &x1, SpectralMode::Frobenius).unwrap();
    for k in [1, 2] {
        assert_eq!(step_extrapolated(&p, &x0, &x1, k, SpectralMode::Frobenius).unwrap(), plain);
    }
    for k in [3, 7, 40] {
        let same = step_extrapolated(&p, &x1, &x1, k, SpectralMode::Frobenius).unwrap();
        assert_eq!(same, plain);
    }
    // k = 5: weight 3/6, composed by hand.
    let nu = Blocks(
        (0..p.num_blocks())
            .map(|b| {
                let mut v = x1[b].scale(1.5);
                v.axpy(-0.5, &x0[b]);
                v
            })
            .collect(),
    );
    let manual = step_nonhomogeneous(&p, &nu, SpectralMode::Frobenius).unwrap();
    let got = step_extrapolated(&p, &x0, &x1, 5, SpectralMode::Frobenius).unwrap();
    assert!(got.max_abs_diff(&manual) <= 1e-12);
}

#[test]
fn gradient_baseline_composition() {
    let (p, x) = small(4, Some(1.0));
    let g = model::gradient(&p, &x).unwrap();
    let manual = p.project(&x.axpy(1.0 / 3.0, &g));
    assert!(step_gradient_baseline(&p, &x, 3).unwrap().max_abs_diff(&manual) < 1e-14);
    let far = step_gradient_baseline(&p, &x, 1_000_000_000).unwrap();
    assert!(far.max_abs_diff(&x) < 1e-7);
    let stationary = scalar_unit_problem();
    let xs = Blocks(vec![CMat::column_real(&[2.0])]);
    assert_eq!(step_gradient_baseline(&stationary, &xs, 1).unwrap(), xs);
}

#[test]
fn polyak_composition() {
    let (p, x0) = small(5, Some(1.0));
    let x1 = step_nonhomogeneous(&p, &x0, SpectralMode::Frobenius).unwrap();
    let g = step_nonhomogeneous(&p, &x1, SpectralMode::Frobenius).unwrap();
    assert_eq!(step_polyak(&p, &x0, &x1, 2, SpectralMode::Frobenius).unwrap(), g);
    let manual = p.project(&g.axpy(0.5, &x1.sub(&x0)));
    assert!(step_polyak(&p, &x0, &x1, 5, SpectralMode::Frobenius).unwrap().max_abs_diff(&manual) < 1e-14);
}

#[test]
fn exact_constants_never_gain_less() {
    for seed in 0..10 {
        let (p, x) = small(seed, Some(1.0));
        let y = model::optimal_y(&p, &x).unwrap();
        let ds = model::dmats(&p, &y);
        let gain = |mode| {
            let lams = step_constants(p.groups(), &ds, mode).unwrap();
            let next = step_nonhomogeneous(&p, &x, mode).unwrap();
            model::f_t(&p, &next, &y, &x, &lams) - model::f_t(&p, &x, &y, &x, &lams)
        };
        assert!(gain(SpectralMode::Exact) >= gain(SpectralMode::Frobenius) - 1e-12);
    }
}

#[test]
fn run_validates_options_and_counts_records() {
    let (p, x) = small(6, Some(1.0));
    let mut opts = SolverOptions::with_iters(0, 1e-8);
    assert!(run(&p, &x, SolverId::Conventional, &opts).is_err());
    opts.max_iters = 1;
    for id in SolverId::RATIO_SOLVERS {
        let t = run(&p, &x, id, &opts).unwrap();
        assert_eq!(t.records.len(), 1);
        assert_eq!(t.records[0].iter, 1);
    }
    assert!(run(&p, &x, SolverId::WmmseClassic, &opts).is_err());
}

#[test]
fn constant_ratio_converges_immediately() {
    let p = scalar_unit_problem();
    let x = Blocks(vec![CMat::column_real(&[3.0])]);
    for id in [SolverId::Conventional, SolverId::Nonhomogeneous, SolverId::Extrapolated] {
        let t = run(&p, &x, id, &SolverOptions::default()).unwrap();
        assert!(t.records.len() <= 2);
        assert_eq!(t.termination, Termination::Converged);
        assert!((t.final_objective() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn run_traces_are_monotone_for_mm_methods() {
    let (p, x) = fig2(8);
    let opts = SolverOptions::with_iters(200, 1e-14);
    for id in [SolverId::Conventional, SolverId::Nonhomogeneous] {
        let t = run(&p, &x, id, &opts).unwrap();
        let mut prev = t.initial_objective;
        for r in &t.records {
            assert!(r.objective >= prev - 1e-9 * prev.abs().max(1.0));
            prev = r.objective;
        }
        assert!(t.records.windows(2).all(|w| w[1].elapsed_s >= w[0].elapsed_s && w[1].iter == w[0].iter + 1));
    }
}

#[test]
fn zero_schedule_reduces_to_base_method() {
    let (p, x) = fig2(9);
    let opts = SolverOptions {
        max_iters: 60,
        rel_obj_tol: 1e-15,
        schedule: Schedule::Zero,
        ..SolverOptions::default()
    };
    let a = run(&p, &x, SolverId::Extrapolated, &opts).unwrap();
    let b = run(&p, &x, SolverId::Nonhomogeneous, &opts).unwrap();
    assert_eq!(a.objectives(), b.objectives());
    assert_eq!(a.final_iterate, b.final_iterate);
    let c = run(&p, &x, SolverId::Polyak, &opts).unwrap();
    assert_eq!(c.objectives(), b.objectives());
}

#[test]
fn run_projects_infeasible_start() {
    let (p, x) = small(10, Some(1.0));
    let big = x.scale(10.0);
    let t = run(&p, &big, SolverId::Nonhomogeneous, &SolverOptions::with_iters(3, 1e-12)).unwrap();
    let fp = model::objective(&p, &p.project(&big)).unwrap();
    assert_eq!(t.initial_objective, fp);
}

#[test]
fn csv_round_trip() {
    let (p, x) = small(11, Some(1.0));
    let t = run(&p, &x, SolverId::Conventional, &SolverOptions::with_iters(5, 1e-14)).unwrap();
    let csv = t.to_csv();
    assert!(csv.starts_with("iter,elapsed_s,objective\n"));
    let back = read_csv(&csv).unwrap();
    assert_eq!(back, t.records);
    assert!(read_csv("a,b\n1,2\n").is_err());
}

#[test]
fn solver_ids_parse_aliases() {
    assert_eq!("alg1".parse::<SolverId>().unwrap(), SolverId::Conventional);
    assert_eq!("ALG3".parse::<SolverId>().unwrap(), SolverId::Extrapolated);
    for id in SolverId::RATIO_SOLVERS.into_iter().chain(SolverId::LOG_SOLVERS) {
        assert_eq!(id.name().parse::<SolverId>().unwrap(), id);
    }
    assert!("newton".parse::<SolverId>().is_err());
}

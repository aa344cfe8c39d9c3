//! Sweeps: build instances from derived seeds, run every selected solver from a shared start,
//! write one CSV per run, then aggregate and record metadata.

use std::path::{Path, PathBuf};

use fracopt::model::random::{random_problem, random_start, seeded_rng};
use fracopt::solvers::{run, ConvergenceTrace, SolverId, SolverOptions, Termination, TraceRecord};
use fracopt::wireless::{solve_isac, solve_mimo, IsacScenario, MimoNetwork};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::aggregate::{mean_by_iteration, mean_on_grid, table_csv, time_grid};
use crate::config::{Experiment, RunConfig};
use crate::error::BenchError;
use crate::seeds::child_seed;

/// Points on the common time axis of the time aggregate.
pub const TIME_GRID_POINTS: usize = 200;
pub const ITER_AGGREGATE: &str = "aggregate_iter.csv";
pub const TIME_AGGREGATE: &str = "aggregate_time.csv";
pub const META_FILE: &str = "meta.json";

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub instance: usize,
    pub seed: u64,
    pub solver: SolverId,
    pub file: String,
    pub scenario_hash: String,
    pub iterations: usize,
    pub termination: Termination,
    pub initial_objective: f64,
    pub final_objective: f64,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub summary: RunSummary,
    pub records: Vec<TraceRecord>,
}

impl RunResult {
    pub fn mean_iteration_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.elapsed_s / r.iter as f64)
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub dir: PathBuf,
    pub runs: Vec<RunResult>,
}

impl ExperimentReport {
    pub fn runs_of(&self, id: SolverId) -> impl Iterator<Item = &RunResult> {
        self.runs.iter().filter(move |r| r.summary.solver == id)
    }
}

/// Active experiment's scenario parameters as a JSON value.
pub fn scenario_params(cfg: &RunConfig) -> Value {
    match cfg.experiment {
        Experiment::Synthetic => serde_json::to_value(&cfg.synthetic),
        Experiment::Isac => serde_json::to_value(&cfg.isac),
        Experiment::Mimo => serde_json::to_value(&cfg.mimo),
    }
    .expect("parameters serialize")
}

/// SHA-256 of the experiment name, its parameters and the instance seed.
pub fn scenario_hash(cfg: &RunConfig, seed: u64) -> String {
    let doc = json!({ "experiment": cfg.experiment, "params": scenario_params(cfg), "seed": seed });
    hex::encode(Sha256::digest(doc.to_string().as_bytes()))
}

pub fn run_file_name(seed: u64, id: SolverId) -> String {
    format!("run_{seed}_{}.csv", id.name())
}

/// Runs one solver on instance `seed` of the configured experiment.
pub fn run_instance(cfg: &RunConfig, seed: u64, id: SolverId) -> Result<ConvergenceTrace<f64>, BenchError> {
    let opts = SolverOptions { seed, ..cfg.options.clone() };
    let start_seed = child_seed(seed, 1);
    let trace = match cfg.experiment {
        Experiment::Synthetic => {
            let mut rng = seeded_rng(seed);
            let p = random_problem::<f64, _>(&cfg.synthetic, &mut rng)?;
            let x0 = random_start(&p, &mut seeded_rng(start_seed));
            run(&p, &x0, id, &opts)?
        }
        Experiment::Isac => {
            let s = IsacScenario::generate(&cfg.isac, seed)?;
            let x0 = s.random_precoders(start_seed);
            solve_isac(&s, id, Some(&x0), &opts)?
        }
        Experiment::Mimo => {
            let net = MimoNetwork::generate(&cfg.mimo, seed)?;
            let x0 = net.random_precoders(start_seed);
            solve_mimo(&net, id, Some(&x0), &opts)?
        }
    };
    Ok(trace)
}

/// Executes the sweep with at most `jobs` runs in flight and writes all outputs under
/// `<out>/<experiment>/`.
pub fn run_experiment(cfg: &RunConfig, jobs: usize) -> Result<ExperimentReport, BenchError> {
    cfg.validate()?;
    let dir = cfg.out.join(cfg.experiment.name());
    std::fs::create_dir_all(&dir)?;
    let tasks: Vec<(usize, u64, SolverId)> = (0..cfg.instances)
        .flat_map(|i| {
            let seed = child_seed(cfg.seed, i as u64);
            cfg.solvers.iter().map(move |&id| (i, seed, id))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Failure(e.to_string()))?;
    let runs: Vec<RunResult> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(instance, seed, id)| {
                let trace = run_instance(cfg, seed, id)
                    .map_err(|e| BenchError::Failure(format!("instance {instance} (seed {seed}), {id}: {e}")))?;
                let file = run_file_name(seed, id);
                std::fs::write(dir.join(&file), trace.to_csv())?;
                Ok(RunResult {
                    summary: RunSummary {
                        instance,
                        seed,
                        solver: id,
                        file,
                        scenario_hash: scenario_hash(cfg, seed),
                        iterations: trace.iterations(),
                        termination: trace.termination,
                        initial_objective: trace.initial_objective,
                        final_objective: trace.final_objective(),
                    },
                    records: trace.records,
                })
            })
            .collect::<Result<_, BenchError>>()
    })?;
    let report = ExperimentReport { dir, runs };
    write_aggregates(cfg, &report)?;
    write_meta(cfg, &report)?;
    Ok(report)
}

fn write_aggregates(cfg: &RunConfig, report: &ExperimentReport) -> Result<(), BenchError> {
    let names: Vec<String> = cfg.solvers.iter().map(|id| id.name().to_string()).collect();
    let per_solver: Vec<Vec<&[TraceRecord]>> = cfg
        .solvers
        .iter()
        .map(|&id| report.runs_of(id).map(|r| r.records.as_slice()).collect())
        .collect();

    let by_iter: Vec<Vec<f64>> = per_solver.iter().map(|runs| mean_by_iteration(runs)).collect();
    let len = by_iter.iter().map(Vec::len).max().unwrap_or(0);
    let iters: Vec<String> = (1..=len).map(|k| k.to_string()).collect();
    std::fs::write(report.dir.join(ITER_AGGREGATE), table_csv("iter", &names, &iters, &by_iter))?;

    let horizon = report
        .runs
        .iter()
        .filter_map(|r| r.records.last().map(|l| l.elapsed_s))
        .fold(0.0, f64::max);
    let grid = time_grid(horizon, TIME_GRID_POINTS);
    let by_time: Vec<Vec<f64>> = per_solver.iter().map(|runs| mean_on_grid(runs, &grid)).collect();
    let times: Vec<String> = grid.iter().map(|t| format!("{t:.9e}")).collect();
    std::fs::write(report.dir.join(TIME_AGGREGATE), table_csv("elapsed_s", &names, &times, &by_time))?;
    Ok(())
}

fn write_meta(cfg: &RunConfig, report: &ExperimentReport) -> Result<(), BenchError> {
    let meta = json!({
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "instances": cfg.instances,
        "solvers": cfg.solvers,
        "options": cfg.options,
        "params": scenario_params(cfg),
        "runs": report.runs.iter().map(|r| &r.summary).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    std::fs::write(report.dir.join(META_FILE), text + "\n")?;
    Ok(())
}

/// Reads every `run_*.csv` of an experiment directory, sorted by file name.
pub fn read_runs(dir: &Path) -> Result<Vec<(String, Vec<TraceRecord>)>, BenchError> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        if name.starts_with("run_") && name.ends_with(".csv") {
            out.push((name, fracopt::solvers::read_csv(&std::fs::read_to_string(&path)?)?));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracopt_bench::{
    cmd_rates, cmd_verify, parse_solvers, run_experiment, BenchError, Experiment, FStar, RunConfig, SuiteSizes,
};

/// Quadratic-transform fractional programming benchmarks.
#[derive(Parser)]
#[command(name = "fracopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random sum-of-ratios instances.
    Synthetic(RunArgs),
    /// Two-cell sensing and communication precoding.
    Isac(RunArgs),
    /// Multi-cell MIMO weighted sum-rate precoding.
    Mimo(RunArgs),
    /// Fit convergence slopes to trace files.
    Rates {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// `best` (best final objective among the traces) or a number.
        #[arg(long, default_value = "best")]
        fstar: String,
        /// First iteration included in the fit.
        #[arg(long, default_value_t = 1)]
        from: usize,
    },
    /// Run invariant suites; all of them when no suite is named.
    Verify {
        suite: Option<String>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated solver ids.
    #[arg(long)]
    solvers: Option<String>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parameter overrides, `name=value,...`.
    #[arg(long)]
    scale: Option<String>,
    /// Number of random instances.
    #[arg(long)]
    instances: Option<usize>,
}

fn build_config(experiment: Experiment, args: &RunArgs) -> Result<RunConfig, BenchError> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::new(experiment),
    };
    if cfg.experiment != experiment {
        return Err(BenchError::Usage(format!(
            "config describes the {} experiment, not {experiment}",
            cfg.experiment
        )));
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(list) = &args.solvers {
        cfg.solvers = parse_solvers(list)?;
    }
    if let Some(n) = args.iters {
        cfg.options.max_iters = n;
    }
    if let Some(t) = args.tol {
        cfg.options.rel_obj_tol = t;
    }
    if let Some(o) = &args.out {
        cfg.out = o.clone();
    }
    if let Some(n) = args.instances {
        cfg.instances = n;
    }
    if let Some(spec) = &args.scale {
        cfg.apply_scale(spec)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn experiment(experiment: Experiment, args: &RunArgs) -> Result<(), BenchError> {
    let cfg = build_config(experiment, args)?;
    let report = run_experiment(&cfg, args.jobs)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "instance,seed,solver,iterations,termination,initial_objective,final_objective,mean_iter_s")?;
    for r in &report.runs {
        let s = &r.summary;
        writeln!(
            out,
            "{},{},{},{},{},{:.10e},{:.10e},{:.3e}",
            s.instance,
            s.seed,
            s.solver,
            s.iterations,
            serde_json::to_value(s.termination).expect("serializes").as_str().unwrap_or_default(),
            s.initial_objective,
            s.final_objective,
            r.mean_iteration_time()
        )?;
    }
    eprintln!("wrote {} runs to {}", report.runs.len(), report.dir.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Synthetic(a) => experiment(Experiment::Synthetic, &a),
        Command::Isac(a) => experiment(Experiment::Isac, &a),
        Command::Mimo(a) => experiment(Experiment::Mimo, &a),
        Command::Rates { traces, fstar, from } => {
            let fits = cmd_rates(&traces, fstar.parse::<FStar>()?, from)?;
            let mut out = std::io::stdout().lock();
            writeln!(out, "trace,slope,intercept,r_squared,first_iter,last_iter")?;
            for (name, f) in fits {
                writeln!(
                    out,
                    "{name},{:.6},{:.6},{:.6},{},{}",
                    f.slope, f.intercept, f.r_squared, f.window.0, f.window.1
                )?;
            }
            Ok(())
        }
        Command::Verify { suite, seed } => {
            let reports = cmd_verify(suite.as_deref(), seed, &SuiteSizes::default())?;
            let mut out = std::io::stdout().lock();
            let mut failures = 0;
            for r in &reports {
                writeln!(out, "{}", serde_json::to_string(r).expect("report serializes"))?;
                failures += r.failures;
            }
            writeln!(
                out,
                "{}",
                serde_json::json!({ "suites": reports.len(), "failures": failures, "passed": failures == 0 })
            )?;
            if failures == 0 {
                Ok(())
            } else {
                Err(BenchError::Failure(format!("{failures} property checks failed")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(BenchError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracopt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

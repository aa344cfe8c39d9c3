use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::options::{SolverId, SolverOptions};
use crate::error::{FpError, Result};
use crate::model::Iterate;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub elapsed_s: f64,
    pub objective: f64,
    /// Optional per-ratio columns (`t_0, t_1, …`).
    pub extra: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceTrace<T> {
    pub solver: SolverId,
    pub seed: u64,
    /// Objective at the (projected) starting point; not part of `records`.
    pub initial_objective: f64,
    pub records: Vec<TraceRecord>,
    pub final_iterate: Iterate<T>,
    pub termination: Termination,
}

impl<T: Real> ConvergenceTrace<T> {
    pub fn final_objective(&self) -> f64 {
        self.records.last().map_or(self.initial_objective, |r| r.objective)
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// Mean wall time per iteration in seconds.
    pub fn mean_iteration_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.elapsed_s / r.iter as f64)
    }

    pub fn to_csv(&self) -> String {
        write_csv(&self.records)
    }
}

/// Formats records as `iter,elapsed_s,objective[,t_0,…]` with 17 significant digits.
pub fn write_csv(records: &[TraceRecord]) -> String {
    let extra = records.first().map_or(0, |r| r.extra.len());
    let mut out = String::from("iter,elapsed_s,objective");
    for i in 0..extra {
        let _ = write!(out, ",t_{i}");
    }
    out.push('\n');
    for r in records {
        let _ = write!(out, "{},{:.16e},{:.16e}", r.iter, r.elapsed_s, r.objective);
        for v in &r.extra {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}

/// Parses the output of [`write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<TraceRecord>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| FpError::Parse("empty trace".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[..3] != ["iter", "elapsed_s", "objective"] {
        return Err(FpError::Parse(format!("unexpected trace header `{header}`")));
    }
    let mut records = Vec::new();
    for (ln, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(FpError::Parse(format!("row {}: expected {} fields", ln + 2, cols.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| FpError::Parse(format!("row {}: {e}", ln + 2)));
        records.push(TraceRecord {
            iter: fields[0]
                .parse()
                .map_err(|e| FpError::Parse(format!("row {}: {e}", ln + 2)))?,
            elapsed_s: num(fields[1])?,
            objective: num(fields[2])?,
            extra: fields[3..].iter().map(|s| num(s)).collect::<Result<_>>()?,
        });
    }
    Ok(records)
}

/// Shared outer loop: calls `advance(k)` for `k = 1, 2, …` until the relative objective
/// change drops below tolerance or the iteration budget runs out.
pub(crate) fn drive(
    opts: &SolverOptions,
    f0: f64,
    mut advance: impl FnMut(usize) -> Result<(f64, Vec<f64>)>,
) -> Result<(Vec<TraceRecord>, Termination)> {
    opts.validate()?;
    let start = Instant::now();
    let mut records = Vec::with_capacity(opts.max_iters.min(4096));
    let mut prev = f0;
    for k in 1..=opts.max_iters {
        let (f, extra) = advance(k)?;
        if !f.is_finite() {
            return Err(FpError::NonFinite);
        }
        let elapsed_s = if opts.record_wall_time {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        records.push(TraceRecord {
            iter: k,
            elapsed_s,
            objective: f,
            extra,
        });
        if (f - prev).abs() / f.abs().max(1.0) < opts.rel_obj_tol {
            return Ok((records, Termination::Converged));
        }
        prev = f;
    }
    Ok((records, Termination::MaxIterations))
}

//! Empirical convergence rates: least-squares slope of `log(f* − f_k)` against `log k`.

use std::path::Path;

use fracopt::solvers::{read_csv, TraceRecord};
use serde::Serialize;

use crate::error::BenchError;

/// Gaps at or below this are treated as converged and left out of the fit.
pub const GAP_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// First and last iteration used.
    pub window: (usize, usize),
    pub points: usize,
}

/// Reference value the gaps are measured against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FStar {
    /// Best final objective across the traces being fitted.
    Best,
    Value(f64),
}

impl std::str::FromStr for FStar {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        if s == "best" {
            return Ok(Self::Best);
        }
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Self::Value)
            .ok_or_else(|| BenchError::Usage(format!("--fstar expects `best` or a number, got `{s}`")))
    }
}

/// Fits `log(f_star − f_k) = intercept + slope · log k` over iterations `k ≥ from` whose gap
/// exceeds [`GAP_FLOOR`].
pub fn fit_rate(points: &[(usize, f64)], f_star: f64, from: usize) -> Result<RateFit, BenchError> {
    let data: Vec<(f64, f64, usize)> = points
        .iter()
        .filter(|&&(k, f)| k >= from.max(1) && f_star - f > GAP_FLOOR)
        .map(|&(k, f)| ((k as f64).ln(), (f_star - f).ln(), k))
        .collect();
    if data.len() < 2 || data.iter().all(|d| d.0 == data[0].0) {
        return Err(BenchError::Solver(fracopt::FpError::DegenerateTrace(format!(
            "only {} iterations with a gap above {GAP_FLOOR:e}",
            data.len()
        ))));
    }
    let n = data.len() as f64;
    let mx = data.iter().map(|d| d.0).sum::<f64>() / n;
    let my = data.iter().map(|d| d.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y, _) in &data {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        window: (data[0].2, data[data.len() - 1].2),
        points: data.len(),
    })
}

/// Convenience for trace records.
pub fn fit_records(records: &[TraceRecord], f_star: f64, from: usize) -> Result<RateFit, BenchError> {
    let pts: Vec<(usize, f64)> = records.iter().map(|r| (r.iter, r.objective)).collect();
    fit_rate(&pts, f_star, from)
}

/// Minimum number of iterations a trace needs to be fitted.
pub const MIN_ITERATIONS: usize = 20;

/// Reads trace files and fits each against a common reference.
pub fn cmd_rates(files: &[impl AsRef<Path>], f_star: FStar, from: usize) -> Result<Vec<(String, RateFit)>, BenchError> {
    if files.is_empty() {
        return Err(BenchError::Usage("rates needs at least one trace file".into()));
    }
    let mut traces = Vec::with_capacity(files.len());
    for f in files {
        let path = f.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let records = read_csv(&text)?;
        if records.len() < MIN_ITERATIONS {
            return Err(BenchError::Solver(fracopt::FpError::DegenerateTrace(format!(
                "{} has {} iterations, need at least {MIN_ITERATIONS}",
                path.display(),
                records.len()
            ))));
        }
        traces.push((path.display().to_string(), records));
    }
    let reference = match f_star {
        FStar::Value(v) => v,
        FStar::Best => traces
            .iter()
            .map(|(_, r)| r.last().expect("nonempty").objective)
            .fold(f64::NEG_INFINITY, f64::max),
    };
    traces
        .into_iter()
        .map(|(name, records)| Ok((name, fit_records(&records, reference, from)?)))
        .collect()
}

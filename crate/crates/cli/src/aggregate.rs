//! Mean curves across runs, against iteration index and against wall time.

use std::fmt::Write as _;

use fracopt::solvers::TraceRecord;

/// Mean objective at iterations `1..=max_len`; a run that stopped early contributes its last value.
pub fn mean_by_iteration(runs: &[&[TraceRecord]]) -> Vec<f64> {
    let len = runs.iter().map(|r| r.len()).max().unwrap_or(0);
    (0..len)
        .map(|k| {
            let total: f64 = runs
                .iter()
                .filter(|r| !r.is_empty())
                .map(|r| r[k.min(r.len() - 1)].objective)
                .sum();
            total / runs.iter().filter(|r| !r.is_empty()).count() as f64
        })
        .collect()
}

/// Piecewise-linear value of a trace at time `t`: constant before the first and after the last record.
pub fn interpolate_at(records: &[TraceRecord], t: f64) -> f64 {
    let first = &records[0];
    if t <= first.elapsed_s {
        return first.objective;
    }
    let idx = records.partition_point(|r| r.elapsed_s <= t);
    if idx >= records.len() {
        return records[records.len() - 1].objective;
    }
    let (a, b) = (&records[idx - 1], &records[idx]);
    let span = b.elapsed_s - a.elapsed_s;
    if span <= 0.0 {
        return b.objective;
    }
    a.objective + (b.objective - a.objective) * (t - a.elapsed_s) / span
}

/// `points` evenly spaced times from 0 to `horizon`.
pub fn time_grid(horizon: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![horizon];
    }
    (0..points).map(|i| horizon * i as f64 / (points - 1) as f64).collect()
}

pub fn mean_on_grid(runs: &[&[TraceRecord]], grid: &[f64]) -> Vec<f64> {
    let live: Vec<_> = runs.iter().filter(|r| !r.is_empty()).collect();
    grid.iter()
        .map(|&t| live.iter().map(|r| interpolate_at(r, t)).sum::<f64>() / live.len() as f64)
        .collect()
}

/// Writes `<axis>,<col_1>,…` followed by one row per axis value.
pub fn table_csv(axis: &str, columns: &[String], axis_values: &[String], data: &[Vec<f64>]) -> String {
    let mut out = String::from(axis);
    for c in columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (i, a) in axis_values.iter().enumerate() {
        out.push_str(a);
        for col in data {
            match col.get(i) {
                Some(v) => {
                    let _ = write!(out, ",{v:.16e}");
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(iter: usize, t: f64, f: f64) -> TraceRecord {
        TraceRecord { iter, elapsed_s: t, objective: f, extra: vec![] }
    }

    #[test]
    fn iteration_means_carry_forward() {
        let a = vec![rec(1, 0.1, 1.0), rec(2, 0.2, 3.0), rec(3, 0.3, 5.0)];
        let b = vec![rec(1, 0.1, 2.0)];
        assert_eq!(mean_by_iteration(&[&a, &b]), vec![1.5, 2.5, 3.5]);
        assert!(mean_by_iteration(&[]).is_empty());
    }

    #[test]
    fn interpolation() {
        let a = vec![rec(1, 1.0, 10.0), rec(2, 2.0, 20.0), rec(3, 4.0, 0.0)];
        assert_eq!(interpolate_at(&a, 0.0), 10.0);
        assert_eq!(interpolate_at(&a, 1.5), 15.0);
        assert_eq!(interpolate_at(&a, 3.0), 10.0);
        assert_eq!(interpolate_at(&a, 9.0), 0.0);
        let grid = time_grid(4.0, 5);
        assert_eq!(grid, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(mean_on_grid(&[&a, &a], &grid), vec![10.0, 10.0, 20.0, 10.0, 0.0]);
    }

    #[test]
    fn table_layout() {
        let csv = table_csv("iter", &["a".into(), "b".into()], &["1".into(), "2".into()], &[vec![1.0, 2.0], vec![3.0]]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "iter,a,b");
        assert!(lines[2].ends_with(','));
    }
}

//! Result files: per-run CSVs, the summary and convergence tables, the
//! gnuplot script and the failure log.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::Experiment;
use crate::run::{RunOutcome, RunStatus};

/// Identifies the experiment a run belongs to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupKey {
    pub problem: String,
    pub method: String,
    pub surrogate: String,
    pub horizon: usize,
    pub sampling: String,
}

impl GroupKey {
    pub fn of(exp: &Experiment) -> Self {
        Self {
            problem: exp.problem.name().to_string(),
            method: exp.method.to_string(),
            surrogate: exp.surrogate.to_string(),
            horizon: exp.horizon,
            sampling: exp.sampling_label(),
        }
    }

    fn of_row(row: &RunRow) -> Self {
        Self {
            problem: row.problem.clone(),
            method: row.method.clone(),
            surrogate: row.surrogate.clone(),
            horizon: row.horizon,
            sampling: row.sampling.clone(),
        }
    }
}

/// One line of a per-run CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub problem: String,
    pub method: String,
    pub surrogate: String,
    pub horizon: usize,
    pub sampling: String,
    pub seed: u64,
    pub iteration: usize,
    pub phase: String,
    /// Coordinates joined by commas.
    pub x: String,
    pub f: f64,
    pub incumbent: f64,
    pub gap: Option<f64>,
    pub solve_seconds: f64,
}

/// Converts a run into CSV rows.
pub fn run_rows(exp: &Experiment, outcome: &RunOutcome) -> Vec<RunRow> {
    let key = GroupKey::of(exp);
    outcome
        .records
        .iter()
        .map(|r| RunRow {
            problem: key.problem.clone(),
            method: key.method.clone(),
            surrogate: key.surrogate.clone(),
            horizon: key.horizon,
            sampling: key.sampling.clone(),
            seed: r.seed,
            iteration: r.iteration,
            phase: r.phase.as_str().to_string(),
            x: r.x.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
            f: r.f,
            incumbent: r.incumbent,
            gap: r.gap,
            solve_seconds: r.solve_seconds,
        })
        .collect()
}

/// `runs/<problem>_<method tag>_<seed>.csv` under `out`.
pub fn run_file(out: &Path, exp: &Experiment, seed: u64) -> PathBuf {
    out.join("runs").join(format!(
        "{}_{}_{}.csv",
        exp.problem.name(),
        exp.method_tag(),
        seed
    ))
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_run_csv(path: &Path) -> anyhow::Result<Vec<RunRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// A run that did not produce a usable gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub file: String,
    pub problem: String,
    pub method: String,
    pub seed: u64,
    pub reason: String,
}

pub fn failure_row(exp: &Experiment, outcome: &RunOutcome) -> Option<FailureRow> {
    let reason = match (&outcome.status, outcome.degenerate_gap) {
        (RunStatus::Failed(msg), _) => msg.clone(),
        (RunStatus::Completed, true) => "degenerate gap: warm-up reached f*".to_string(),
        (RunStatus::Completed, false) => return None,
    };
    let file = run_file(Path::new(""), exp, outcome.seed);
    Some(FailureRow {
        file: file.file_name().unwrap().to_string_lossy().into_owned(),
        problem: exp.problem.name().to_string(),
        method: exp.method_tag(),
        seed: outcome.seed,
        reason,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub problem: String,
    pub method: String,
    pub surrogate: String,
    pub horizon: usize,
    pub sampling: String,
    pub mean_gap: f64,
    pub median_gap: f64,
    pub stderr_gap: f64,
    pub mean_iter_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub problem: String,
    pub method: String,
    pub surrogate: String,
    pub horizon: usize,
    pub sampling: String,
    pub iteration: usize,
    pub mean_gap: f64,
    pub median_gap: f64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Per-run rows, one vector per completed run.
pub type Runs = Vec<Vec<RunRow>>;

/// Mean, median and standard error of the final gap and the mean solve time
/// per group. Runs without a defined final gap are skipped.
pub fn summarize(runs: &Runs) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<GroupKey, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for rows in runs {
        let Some(last) = rows.last() else { continue };
        let Some(gap) = last.gap else { continue };
        let entry = groups.entry(GroupKey::of_row(last)).or_default();
        entry.0.push(gap);
        entry.1.extend(
            rows.iter()
                .filter(|r| r.phase == "query")
                .map(|r| r.solve_seconds),
        );
    }
    groups
        .into_iter()
        .map(|(key, (mut gaps, times))| {
            let n = gaps.len() as f64;
            let m = mean(&gaps);
            let stderr = if gaps.len() > 1 {
                (gaps.iter().map(|g| (g - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt()
            } else {
                0.0
            };
            SummaryRow {
                problem: key.problem,
                method: key.method,
                surrogate: key.surrogate,
                horizon: key.horizon,
                sampling: key.sampling,
                mean_gap: m,
                median_gap: median(&mut gaps),
                stderr_gap: stderr,
                mean_iter_seconds: if times.is_empty() { 0.0 } else { mean(&times) },
            }
        })
        .collect()
}

/// Mean and median gap per group and iteration across runs.
pub fn convergence(runs: &Runs) -> Vec<ConvergenceRow> {
    let mut groups: BTreeMap<(GroupKey, usize), Vec<f64>> = BTreeMap::new();
    for rows in runs {
        for r in rows {
            if let Some(g) = r.gap {
                groups
                    .entry((GroupKey::of_row(r), r.iteration))
                    .or_default()
                    .push(g);
            }
        }
    }
    groups
        .into_iter()
        .map(|((key, iteration), mut gaps)| ConvergenceRow {
            problem: key.problem,
            method: key.method,
            surrogate: key.surrogate,
            horizon: key.horizon,
            sampling: key.sampling,
            iteration,
            mean_gap: mean(&gaps),
            median_gap: median(&mut gaps),
        })
        .collect()
}

/// A gnuplot script with the convergence curves inlined as data blocks,
/// one panel per problem.
pub fn plot_script(rows: &[ConvergenceRow]) -> String {
    let mut curves: BTreeMap<String, BTreeMap<String, Vec<(usize, f64)>>> = BTreeMap::new();
    for r in rows {
        let label = format!(
            "{} {} H={} {}",
            r.method, r.surrogate, r.horizon, r.sampling
        );
        curves
            .entry(r.problem.clone())
            .or_default()
            .entry(label)
            .or_default()
            .push((r.iteration, r.mean_gap));
    }
    let mut s = String::new();
    s.push_str("# convergence of the mean optimality gap; run with `gnuplot plot.gp`\n");
    s.push_str("set terminal pngcairo size 900,600\nset key bottom right\n");
    s.push_str("set xlabel 'iteration'\nset ylabel 'mean gap'\nset yrange [0:1]\n");
    let mut block = 0;
    for (problem, series) in &curves {
        let mut plots = Vec::new();
        for (label, points) in series {
            let _ = writeln!(s, "$d{block} << EOD");
            for (i, g) in points {
                let _ = writeln!(s, "{i} {g}");
            }
            s.push_str("EOD\n");
            plots.push(format!("$d{block} using 1:2 with lines title '{label}'"));
            block += 1;
        }
        let _ = writeln!(s, "set output '{problem}.png'\nset title '{problem}'");
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    }
    s
}

/// Writes `summary.csv`, `convergence.csv` and `plot.gp` into `out`.
pub fn write_reports(out: &Path, runs: &Runs) -> anyhow::Result<Vec<SummaryRow>> {
    let summary = summarize(runs);
    write_rows(&out.join("summary.csv"), &summary)?;
    let conv = convergence(runs);
    write_rows(&out.join("convergence.csv"), &conv)?;
    fs::write(out.join("plot.gp"), plot_script(&conv))?;
    Ok(summary)
}

/// Reads every run CSV under `dir/runs`, skipping files listed in
/// `dir/failures.csv`, in file-name order.
pub fn read_runs(dir: &Path) -> anyhow::Result<Runs> {
    let failures_path = dir.join("failures.csv");
    let failed: Vec<String> = if failures_path.exists() {
        let mut r = csv::Reader::from_path(&failures_path)?;
        r.deserialize::<FailureRow>()
            .map(|f| f.map(|f| f.file))
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    let mut files: Vec<PathBuf> = fs::read_dir(dir.join("runs"))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .filter(|p| {
            let name = p.file_name().unwrap().to_string_lossy();
            !failed.iter().any(|f| *f == name)
        })
        .collect();
    files.sort();
    files.iter().map(|p| read_run_csv(p)).collect()
}

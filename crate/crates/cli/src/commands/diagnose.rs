use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;
use spd_augment::data::read_series_csv;
use spd_augment::spdness::{correlation, covariance, downsample_by_averaging, spdness_report, truncate};
use spd_augment::{SeriesMatrix, SpdnessReport, SymmetricMatrix};

use super::load;
use crate::args::{DiagnoseArgs, MatrixKind, Reduce};
use crate::exit::{CliError, CliResult, Status};
use crate::output::{num, Report};

enum Input {
    Matrices(Vec<SymmetricMatrix>),
    Series(SeriesMatrix),
}

fn is_spdb(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("spdb"))
}

struct Row {
    input: usize,
    sample: usize,
    reduce: &'static str,
    report: SpdnessReport,
    t_known: bool,
}

fn build(x: &SeriesMatrix, kind: MatrixKind) -> spd_augment::Result<SymmetricMatrix> {
    match kind {
        MatrixKind::Correlation => correlation(x),
        MatrixKind::Covariance => covariance(x),
    }
}

fn validate(a: &DiagnoseArgs) -> CliResult<()> {
    if let Some(sweep) = &a.sweep {
        if sweep.is_empty() || sweep.iter().any(|&t| t < 2) {
            return Err(CliError::usage("--sweep lengths must all be at least 2"));
        }
        if let Some(p) = a.inputs.iter().find(|p| is_spdb(p)) {
            return Err(CliError::usage(format!("--sweep needs series input, {} is a matrix file", p.display())));
        }
    }
    if a.t.is_some_and(|t| t < 1) {
        return Err(CliError::usage("--t must be positive"));
    }
    Ok(())
}

fn sweep_error(input: &Path, e: spd_augment::Error) -> CliError {
    let base = CliError::from(e);
    CliError::new(base.status, format!("{}: {}", input.display(), base.message))
}

pub fn run(a: &DiagnoseArgs) -> CliResult<()> {
    validate(a)?;
    let inputs: Vec<(PathBuf, Input)> = a
        .inputs
        .iter()
        .map(|p| {
            let input = if is_spdb(p) {
                Input::Matrices(load(p)?.matrices().to_vec())
            } else {
                Input::Series(read_series_csv(p, a.series_layout.into()).map_err(|e| sweep_error(p, e))?)
            };
            Ok((p.clone(), input))
        })
        .collect::<CliResult<_>>()?;

    // every reduction target must fit every series before any work starts
    if let Some(sweep) = &a.sweep {
        let reduce = a.reduce;
        for (path, input) in &inputs {
            if let Input::Series(x) = input {
                for &t in sweep {
                    let len = x.n_steps();
                    if t > len || (reduce == Reduce::Average && !len.is_multiple_of(t)) {
                        return Err(CliError::usage(format!(
                            "{}: cannot {} a series of length {len} to {t}",
                            path.display(),
                            if reduce == Reduce::Average { "average" } else { "truncate" }
                        )));
                    }
                }
            }
        }
    }

    let mut jobs: Vec<(usize, usize, &SymmetricMatrix)> = Vec::new();
    let mut series_jobs: Vec<(usize, &SeriesMatrix, Option<usize>)> = Vec::new();
    for (k, (_, input)) in inputs.iter().enumerate() {
        match input {
            Input::Matrices(ms) => jobs.extend(ms.iter().enumerate().map(|(s, m)| (k, s, m))),
            Input::Series(x) => match &a.sweep {
                Some(sweep) => series_jobs.extend(sweep.iter().map(|&t| (k, x, Some(t)))),
                None => series_jobs.push((k, x, None)),
            },
        }
    }

    let mut rows: Vec<Row> = jobs
        .par_iter()
        .map(|&(k, s, m)| {
            let n = m.dim();
            let t_known = a.t.is_some();
            let report = spdness_report(m, n, a.t.unwrap_or(n + 1))?;
            Ok(Row { input: k, sample: s, reduce: "none", report, t_known })
        })
        .collect::<CliResult<_>>()?;
    let series_rows: Vec<Row> = series_jobs
        .par_iter()
        .map(|&(k, x, target)| {
            let (reduced, reduce) = match target {
                None => (x.clone(), "none"),
                Some(t) => match a.reduce {
                    Reduce::Truncate => (truncate(x, t).map_err(|e| sweep_error(&inputs[k].0, e))?, "truncate"),
                    Reduce::Average => (
                        downsample_by_averaging(x, t).map_err(|e| sweep_error(&inputs[k].0, e))?,
                        "average",
                    ),
                },
            };
            let m = build(&reduced, a.matrix).map_err(|e| sweep_error(&inputs[k].0, e))?;
            let report = spdness_report(&m, reduced.n_vars(), reduced.n_steps())?;
            Ok(Row { input: k, sample: 0, reduce, report, t_known: true })
        })
        .collect::<CliResult<_>>()?;
    rows.extend(series_rows);

    let mut out = Report::open(a.output.as_deref())?;
    out.csv.write_record([
        "input", "sample", "reduce", "n", "t", "positive_count", "spdness_pct", "is_spd", "min_eigenvalue",
    ])?;
    for r in &rows {
        out.csv.write_record([
            inputs[r.input].0.display().to_string(),
            r.sample.to_string(),
            r.reduce.to_string(),
            r.report.n.to_string(),
            if r.t_known { r.report.t.to_string() } else { String::new() },
            r.report.positive_count.to_string(),
            num(r.report.spdness_pct),
            r.report.is_spd.to_string(),
            num(r.report.eigenvalues.first().copied().unwrap_or(f64::NAN)),
        ])?;
    }

    let mean = |rs: &[&Row]| rs.iter().map(|r| r.report.spdness_pct).sum::<f64>() / rs.len().max(1) as f64;
    let all: Vec<&Row> = rows.iter().collect();
    let mut per_t: Vec<serde_json::Value> = Vec::new();
    if let Some(sweep) = &a.sweep {
        let mut ts = sweep.clone();
        ts.sort_unstable();
        ts.dedup();
        for t in ts {
            let at: Vec<&Row> = rows.iter().filter(|r| r.report.t == t).collect();
            per_t.push(json!({"t": t, "mean_spdness_pct": mean(&at), "samples": at.len()}));
        }
    }
    let violations = rows.iter().filter(|r| r.t_known && !r.report.rank_bound_respected()).count();
    let summary = json!({
        "command": "diagnose",
        "samples": rows.len(),
        "mean_spdness_pct": mean(&all),
        "all_spd": rows.iter().all(|r| r.report.is_spd),
        "rank_bound_violations": violations,
        "sweep": per_t,
    });
    out.finish(summary)?;
    if violations > 0 {
        return Err(CliError::new(
            Status::Violation,
            format!("{violations} samples have more positive eigenvalues than min(n, t - 1) allows"),
        ));
    }
    Ok(())
}

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;
use spd_augment::augment::stream_rng;
use spd_augment::regress::{loss_comparison, median_pairwise_distance, LossComparison};
use spd_augment::{Error, KernelConfig, KernelSpace, SpdMatrix, Task};

use super::load;
use crate::args::RegressArgs;
use crate::exit::{CliError, CliResult, Status};
use crate::output::{num, Report};

/// Bandwidth from at most this many samples when `--sigma` is absent.
const SIGMA_SAMPLE: usize = 200;
/// Redraws allowed when a pair turns out to be coincident.
const PAIR_ATTEMPTS: usize = 16;

fn validate(a: &RegressArgs) -> CliResult<()> {
    if a.lambdas.is_empty() || a.lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(CliError::usage("--lambdas must be values in [0, 1]"));
    }
    if a.sigma.is_some_and(|s| !(s > 0.0) || !s.is_finite()) {
        return Err(CliError::usage("--sigma must be positive"));
    }
    Ok(())
}

fn trial(
    samples: &[SpdMatrix],
    labels: &[f64],
    a: &RegressArgs,
    config: &KernelConfig,
    k: usize,
) -> CliResult<(usize, usize, LossComparison)> {
    let mut rng = stream_rng(a.seed, k as u64);
    let len = samples.len();
    for _ in 0..PAIR_ATTEMPTS {
        let i = rng.gen_range(0..len);
        let j = (i + rng.gen_range(1..len)) % len;
        match loss_comparison(&samples[i], &samples[j], labels[i], labels[j], &a.lambdas, config) {
            Ok(table) => return Ok((i, j, table)),
            Err(Error::CoincidentSamples { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(CliError::new(
        Status::Incompatible,
        format!("trial {k}: every drawn pair was coincident; the dataset has too many duplicates"),
    ))
}

pub fn run(a: &RegressArgs) -> CliResult<()> {
    validate(a)?;
    let ds = load(&a.input)?;
    if ds.task() != Task::Regression {
        return Err(CliError::new(Status::Incompatible, "regress needs a regression dataset"));
    }
    if let Some(y) = ds.labels().iter().find(|&&y| y < 0.0) {
        return Err(Error::NegativeLabel { value: *y }.into());
    }
    let mut out = Report::open(a.output.as_deref())?;
    out.csv.write_record([
        "trial", "i", "j", "lambda", "y_mix", "pred_geodesic", "pred_line", "err_geodesic", "err_line",
        "violation", "ordering_holds",
    ])?;
    if a.trials == 0 {
        return out.finish(json!({"command": "regress", "trials": 0, "rows": 0, "violations": 0, "ordering_failures": 0}));
    }
    if ds.len() < 2 {
        return Err(CliError::new(Status::Incompatible, "regress needs at least 2 samples"));
    }
    let samples = ds.spd_matrices()?;
    let space: KernelSpace = a.space.into();
    let sigma = match a.sigma {
        Some(s) => s,
        None => median_pairwise_distance(&samples[..samples.len().min(SIGMA_SAMPLE)], space)?,
    };
    if !(sigma > 0.0) {
        return Err(CliError::new(Status::Incompatible, "median pairwise distance is zero; pass --sigma"));
    }
    let config = KernelConfig { sigma, ridge: 0.0, space };

    let tables = (0..a.trials)
        .into_par_iter()
        .map(|k| trial(&samples, ds.labels(), a, &config, k))
        .collect::<CliResult<Vec<_>>>()?;

    let (mut violations, mut ordering, mut rows) = (0, 0, 0);
    let mut first = None;
    for (k, (i, j, table)) in tables.iter().enumerate() {
        violations += table.violations();
        ordering += table.ordering_failures();
        if first.is_none() {
            first = table.first_failure().map(|r| format!("trial {k} pair ({i}, {j}): {r}"));
        }
        for r in &table.rows {
            rows += 1;
            out.csv.write_record([
                k.to_string(),
                i.to_string(),
                j.to_string(),
                num(r.lambda),
                num(r.y_mix),
                num(r.pred_geodesic),
                num(r.pred_line),
                num(r.err_geodesic),
                num(r.err_line),
                r.violation.to_string(),
                r.ordering_holds.to_string(),
            ])?;
        }
    }
    out.finish(json!({
        "command": "regress",
        "trials": a.trials,
        "rows": rows,
        "sigma": sigma,
        "violations": violations,
        "ordering_failures": ordering,
        "first_failure": first,
    }))?;
    if violations + ordering > 0 {
        return Err(CliError::new(
            Status::Violation,
            format!("{violations} square-loss violations and {ordering} ordering failures over {rows} rows"),
        ));
    }
    Ok(())
}

use serde_json::json;
use spd_augment::augment::stream_rng;
use spd_augment::data::{gen_labeled_dataset, gen_synthetic_series, write_matrices, write_series_csv, DatasetStructure};
use spd_augment::Task;

use crate::args::{GenArgs, Kind};
use crate::exit::{CliError, CliResult};
use crate::output::print_json;

fn validate(a: &GenArgs) -> CliResult<()> {
    if a.n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    if let Some(noise) = a.noise {
        if !(noise >= 0.0) || !noise.is_finite() {
            return Err(CliError::usage("--noise must be nonnegative"));
        }
    }
    match a.kind {
        Kind::Series => {
            if a.t.is_some_and(|t| t < 2) {
                return Err(CliError::usage("--t must be at least 2"));
            }
            if a.latent_rank.is_some_and(|r| r == 0 || r > a.n) {
                return Err(CliError::usage(format!("--latent-rank must be in 1..={}", a.n)));
            }
        }
        Kind::LogLinear | Kind::Clustered => {
            if a.count < 2 {
                return Err(CliError::usage("--count must be at least 2"));
            }
            if a.kind == Kind::Clustered && a.classes == 0 {
                return Err(CliError::usage("--classes must be at least 1"));
            }
            if !(a.spread >= 0.0) {
                return Err(CliError::usage("--spread must be nonnegative"));
            }
        }
    }
    Ok(())
}

pub fn run(a: &GenArgs) -> CliResult<()> {
    validate(a)?;
    let mut rng = stream_rng(a.seed, 0);
    let out = a.output.display().to_string();
    match a.kind {
        Kind::Series => {
            let t = a.t.unwrap_or(2 * a.n);
            let x = gen_synthetic_series(a.n, t, a.latent_rank.unwrap_or(a.n), a.noise.unwrap_or(0.5), &mut rng)?;
            write_series_csv(&a.output, &x, a.series_layout.into())?;
            print_json(&json!({
                "command": "gen", "kind": "series", "n": a.n, "t": t, "seed": a.seed, "output": out,
            }));
        }
        Kind::LogLinear | Kind::Clustered => {
            let (structure, default_task) = match a.kind {
                Kind::LogLinear => (DatasetStructure::LogLinear { noise: a.noise.unwrap_or(0.0) }, Task::Regression),
                _ => (
                    DatasetStructure::Clustered {
                        classes: a.classes,
                        spread: a.spread,
                    },
                    Task::Classification,
                ),
            };
            let task = a.task.map(Task::from).unwrap_or(default_task);
            let ds = gen_labeled_dataset(a.n, a.count, task, structure, &mut rng)?;
            write_matrices(&a.output, &ds)?;
            print_json(&json!({
                "command": "gen",
                "kind": if a.kind == Kind::LogLinear { "log-linear" } else { "clustered" },
                "task": task.to_string(),
                "count": ds.len(),
                "n": a.n,
                "seed": a.seed,
                "output": out,
            }));
        }
    }
    Ok(())
}

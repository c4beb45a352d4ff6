use std::fs::File;
use std::io::BufWriter;

use serde_json::json;
use spd_augment::augment::augment_batch;
use spd_augment::data::{sidecar_path, write_matrices};
use spd_augment::{LabeledDataset, MixConfig, MixedSample, Strategy, Task};

use super::load;
use crate::args::{MixArgs, Switch};
use crate::exit::{CliError, CliResult};
use crate::output::{num, print_json};

fn config(a: &MixArgs) -> CliResult<MixConfig> {
    let config = MixConfig {
        strategy: a.strategy.into(),
        alpha: a.alpha,
        keep_prob: a.keep_prob,
        cmix_bandwidth: a.bandwidth,
        seed: a.seed,
        use_eigencache: a.cache == Switch::On,
    };
    config.validate()?;
    Ok(config)
}

/// Hard class for the dataset file: the heaviest entry of the soft label,
/// lowest class on ties.
fn hard_label(label: &[f64]) -> f64 {
    let mut best = 0;
    for (k, &p) in label.iter().enumerate() {
        if p > label[best] {
            best = k;
        }
    }
    best as f64
}

/// Strategies whose output keeps a unit diagonal when every input has one.
fn keeps_unit_diagonal(s: Strategy) -> bool {
    matches!(s, Strategy::VMixup | Strategy::DMixup | Strategy::DropEdge | Strategy::GMixup)
}

fn write_provenance(path: &std::path::Path, samples: &[MixedSample], task: Task, classes: usize) -> CliResult<()> {
    let f = File::create(path).map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(f));
    let mut header: Vec<String> = ["id", "strategy", "source_i", "source_j", "lambda", "mask_kept", "mask_total", "spd_validated", "warnings"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    match task {
        Task::Regression => header.push("label".into()),
        Task::Classification => header.extend((0..classes).map(|c| format!("p{c}"))),
    }
    w.write_record(&header)?;
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    for (id, s) in samples.iter().enumerate() {
        let p = &s.provenance;
        let mut row = vec![
            id.to_string(),
            p.strategy.to_string(),
            opt(p.sources.0),
            opt(p.sources.1),
            p.lambda.map(num).unwrap_or_default(),
            p.mask.map(|m| m.0.to_string()).unwrap_or_default(),
            p.mask.map(|m| m.1.to_string()).unwrap_or_default(),
            p.spd_validated.to_string(),
            p.warnings.to_string(),
        ];
        row.extend(s.label.iter().map(|&y| num(y)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(a: &MixArgs) -> CliResult<()> {
    let config = config(a)?;
    let input = load(&a.input)?;
    let count = a.count.unwrap_or(input.len());
    let batch = augment_batch(&input, &config, count)?;
    for w in &batch.warnings {
        eprintln!("warning: {w}");
    }
    let task = input.task();
    let labels: Vec<f64> = batch
        .samples
        .iter()
        .map(|s| match task {
            Task::Regression => s.label[0],
            Task::Classification => hard_label(&s.label),
        })
        .collect();
    let matrices = batch.samples.iter().map(|s| s.matrix.clone()).collect();
    let unit_diagonal = input.is_correlation() && keeps_unit_diagonal(config.strategy);
    let out = LabeledDataset::new(matrices, labels, task, unit_diagonal)?;
    write_matrices(&a.output, &out)?;
    let provenance = sidecar_path(&a.output, "provenance");
    write_provenance(&provenance, &batch.samples, task, input.num_classes())?;
    print_json(&json!({
        "command": "mix",
        "strategy": config.strategy.to_string(),
        "count": out.len(),
        "seed": a.seed,
        "cache": config.use_eigencache,
        "warnings": batch.warnings.len(),
        "output": a.output.display().to_string(),
        "provenance": provenance.display().to_string(),
    }));
    Ok(())
}

use rand::Rng;
use rayon::prelude::*;

use super::cmixup::c_mixup_pair;
use super::drop::{drop_edge, drop_node};
use super::gmixup::{g_mixup_fit, g_mixup_sample, EdgeGenerator};
use super::mixup::{d_mixup, r_mixup, r_mixup_cached, v_mixup, EigenCache};
use super::sampling::{sample_beta, stream_rng};
use super::{MixConfig, MixedSample, Strategy};
use crate::data::{LabeledDataset, Task};
use crate::error::{Error, Result};
use crate::linalg::SpdMatrix;

#[derive(Clone, Debug, Default)]
pub struct BatchOutput {
    pub samples: Vec<MixedSample>,
    /// Degenerate cases that were handled with a fallback.
    pub warnings: Vec<String>,
}

/// Everything shared by the workers, built before fan-out.
enum Prepared {
    Plain,
    Spd(Vec<SpdMatrix>),
    Cached(EigenCache),
    Generator(EdgeGenerator),
    Bandwidth(f64),
}

fn prepare(dataset: &LabeledDataset, config: &MixConfig) -> Result<Prepared> {
    let strategy = config.strategy;
    if strategy.is_pairwise() && dataset.len() < 2 {
        return Err(Error::Incompatible(format!("{strategy} needs at least 2 samples")));
    }
    if dataset.is_empty() {
        return Err(Error::Incompatible(format!("{strategy} needs a nonempty dataset")));
    }
    Ok(match strategy {
        Strategy::RMixup => {
            let spd = dataset
                .spd_matrices()
                .map_err(|e| Error::Incompatible(format!("rmixup needs SPD inputs ({e})")))?;
            if config.use_eigencache {
                Prepared::Cached(EigenCache::build(&spd)?)
            } else {
                Prepared::Spd(spd)
            }
        }
        Strategy::GMixup => Prepared::Generator(g_mixup_fit(dataset)?),
        Strategy::CMixup => {
            let bw = match (config.cmix_bandwidth, dataset.task()) {
                (Some(bw), _) => bw,
                (None, Task::Classification) => 1.0,
                (None, Task::Regression) => {
                    let s = dataset.label_std();
                    if !(s > 0.0) {
                        return Err(Error::Incompatible(
                            "cmixup default bandwidth is the label standard deviation, which is zero".into(),
                        ));
                    }
                    s
                }
            };
            Prepared::Bandwidth(bw)
        }
        _ => Prepared::Plain,
    })
}

/// `count` augmented samples. Output `k` uses its own random stream derived
/// from `(config.seed, k)`, so the batch is identical however it is scheduled.
pub fn augment_batch(dataset: &LabeledDataset, config: &MixConfig, count: usize) -> Result<BatchOutput> {
    config.validate()?;
    if count == 0 {
        return Ok(BatchOutput::default());
    }
    let prepared = prepare(dataset, config)?;
    let mut warnings: Vec<String> = match &prepared {
        Prepared::Generator(g) => g.warnings().to_vec(),
        _ => Vec::new(),
    };
    let samples = (0..count)
        .into_par_iter()
        .map(|k| one_sample(dataset, config, &prepared, k as u64))
        .collect::<Result<Vec<_>>>()?;
    let fallbacks = samples
        .iter()
        .filter(|s| s.provenance.strategy == Strategy::CMixup && s.provenance.warnings > 0)
        .count();
    if fallbacks > 0 {
        warnings.push(format!("{fallbacks} cmixup anchors had no same-class partner and were paired with themselves"));
    }
    Ok(BatchOutput { samples, warnings })
}

fn one_sample(dataset: &LabeledDataset, config: &MixConfig, prepared: &Prepared, k: u64) -> Result<MixedSample> {
    let mut rng = stream_rng(config.seed, k);
    let n = dataset.len();
    let i = rng.gen_range(0..n);
    let ids = dataset.ids();
    if !config.strategy.is_pairwise() {
        let s = dataset.matrix(i);
        let y = dataset.target(i);
        let out = match config.strategy {
            Strategy::DropNode => drop_node(s, &y, config.keep_prob, &mut rng)?,
            _ => drop_edge(s, &y, config.keep_prob, &mut rng)?,
        };
        return Ok(out.with_sources(ids[i], None));
    }

    let mut fallback = false;
    let j = match prepared {
        Prepared::Bandwidth(bw) => {
            let choice = c_mixup_pair(dataset, i, *bw, &mut rng)?;
            fallback = choice.fallback;
            choice.index
        }
        _ => {
            let j = rng.gen_range(0..n - 1);
            if j >= i {
                j + 1
            } else {
                j
            }
        }
    };
    let lambda = sample_beta(config.alpha, &mut rng)?;
    let (y_i, y_j) = (dataset.target(i), dataset.target(j));
    let mut out = match (config.strategy, prepared) {
        (Strategy::RMixup, Prepared::Cached(cache)) => {
            let e = cache.entries();
            r_mixup_cached(&e[i], &e[j], &y_i, &y_j, lambda)?
        }
        (Strategy::RMixup, Prepared::Spd(spd)) => r_mixup(&spd[i], &spd[j], &y_i, &y_j, lambda)?,
        (Strategy::GMixup, Prepared::Generator(g)) => {
            g_mixup_sample(g, dataset.label(i), dataset.label(j), lambda, &mut rng)?
        }
        (Strategy::DMixup, _) => d_mixup(dataset.matrix(i), dataset.matrix(j), &y_i, &y_j, lambda, &mut rng)?,
        (Strategy::VMixup, _) | (Strategy::CMixup, _) => {
            v_mixup(dataset.matrix(i), dataset.matrix(j), &y_i, &y_j, lambda)?
        }
        (s, _) => unreachable!("{s} prepared inconsistently"),
    };
    out.provenance.strategy = config.strategy;
    if fallback {
        out.provenance.warnings += 1;
    }
    Ok(out.with_sources(ids[i], Some(ids[j])))
}

//! Per-edge Gaussian generators. Classification fits one normal per edge and
//! class; regression fits a joint normal of each edge with the label and
//! samples from the conditional law at the mixed label.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{mix_labels, MixedSample, Provenance, Strategy};
use crate::data::{LabeledDataset, Task};
use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::metrics::MixRatio;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassEdgeStats {
    pub count: usize,
    pub mean: DMatrix<f64>,
    /// Sample standard deviation; zero for singleton classes.
    pub std: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq)]
enum EdgeModel {
    Classes(Vec<Option<ClassEdgeStats>>),
    Conditional {
        mean: DMatrix<f64>,
        std: DMatrix<f64>,
        rho: DMatrix<f64>,
        label_mean: f64,
        label_std: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeGenerator {
    dim: usize,
    is_correlation: bool,
    model: EdgeModel,
    warnings: Vec<String>,
}

impl EdgeGenerator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn task(&self) -> Task {
        match self.model {
            EdgeModel::Classes(_) => Task::Classification,
            EdgeModel::Conditional { .. } => Task::Regression,
        }
    }

    /// Degenerate fits that were accepted with a fallback.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Statistics of class `c`, `None` when the class had no samples.
    pub fn class_stats(&self, c: usize) -> Option<&ClassEdgeStats> {
        match &self.model {
            EdgeModel::Classes(classes) => classes.get(c).and_then(Option::as_ref),
            EdgeModel::Conditional { .. } => None,
        }
    }

    /// Edge-label correlation for regression generators.
    pub fn edge_label_correlation(&self) -> Option<&DMatrix<f64>> {
        match &self.model {
            EdgeModel::Conditional { rho, .. } => Some(rho),
            EdgeModel::Classes(_) => None,
        }
    }

    /// Edge mean and standard deviation conditional on label `y`
    /// (regression) or of the parameter interpolation between two classes.
    fn edge_law(&self, y_i: f64, y_j: f64, lambda: MixRatio) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let l = lambda.value();
        match &self.model {
            EdgeModel::Classes(classes) => {
                let fetch = |y: f64| {
                    let c = y as usize;
                    classes
                        .get(c)
                        .and_then(Option::as_ref)
                        .filter(|_| y >= 0.0 && y.fract() == 0.0)
                        .ok_or_else(|| Error::Incompatible(format!("no fitted generator for class {y}")))
                };
                let (a, b) = (fetch(y_i)?, fetch(y_j)?);
                Ok((
                    &a.mean * (1.0 - l) + &b.mean * l,
                    &a.std * (1.0 - l) + &b.std * l,
                ))
            }
            EdgeModel::Conditional {
                mean,
                std,
                rho,
                label_mean,
                label_std,
            } => {
                let y = (1.0 - l) * y_i + l * y_j;
                let n = self.dim;
                let m = DMatrix::from_fn(n, n, |p, q| {
                    mean[(p, q)] + std[(p, q)] / label_std * rho[(p, q)] * (y - label_mean)
                });
                let s = DMatrix::from_fn(n, n, |p, q| {
                    ((1.0 - rho[(p, q)].powi(2)).max(0.0)).sqrt() * std[(p, q)]
                });
                Ok((m, s))
            }
        }
    }
}

fn mean_and_std(values: &[&SymmetricMatrix]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = values[0].dim();
    let count = values.len() as f64;
    let mut mean = DMatrix::zeros(n, n);
    for m in values {
        mean += m.matrix();
    }
    mean /= count;
    let mut var = DMatrix::zeros(n, n);
    if values.len() > 1 {
        for m in values {
            var += (m.matrix() - &mean).map(|d| d * d);
        }
        var /= count - 1.0;
    }
    (mean, var.map(f64::sqrt))
}

pub fn g_mixup_fit(dataset: &LabeledDataset) -> Result<EdgeGenerator> {
    let dim = dataset.dim().ok_or(Error::Empty)?;
    let mut warnings = Vec::new();
    let model = match dataset.task() {
        Task::Classification => {
            let classes = (0..dataset.num_classes())
                .map(|c| {
                    let members: Vec<&SymmetricMatrix> = dataset
                        .matrices()
                        .iter()
                        .zip(dataset.labels())
                        .filter(|(_, &y)| y as usize == c)
                        .map(|(m, _)| m)
                        .collect();
                    if members.is_empty() {
                        return None;
                    }
                    if members.len() == 1 {
                        warnings.push(format!("class {c} has a single sample; its edge spread is set to 0"));
                    }
                    let (mean, std) = mean_and_std(&members);
                    Some(ClassEdgeStats {
                        count: members.len(),
                        mean,
                        std,
                    })
                })
                .collect();
            EdgeModel::Classes(classes)
        }
        Task::Regression => {
            let label_std = dataset.label_std();
            if !(label_std > 0.0) {
                return Err(Error::Incompatible(
                    "regression generator needs labels with positive variance".into(),
                ));
            }
            let count = dataset.len() as f64;
            let label_mean = dataset.labels().iter().sum::<f64>() / count;
            let all: Vec<&SymmetricMatrix> = dataset.matrices().iter().collect();
            let (mean, std) = mean_and_std(&all);
            let mut cov = DMatrix::zeros(dim, dim);
            for (m, &y) in dataset.matrices().iter().zip(dataset.labels()) {
                cov += (m.matrix() - &mean) * (y - label_mean);
            }
            cov /= count - 1.0;
            let rho = DMatrix::from_fn(dim, dim, |p, q| {
                let s = std[(p, q)];
                if s > 0.0 {
                    (cov[(p, q)] / (s * label_std)).clamp(-1.0, 1.0)
                } else {
                    0.0
                }
            });
            EdgeModel::Conditional {
                mean,
                std,
                rho,
                label_mean,
                label_std,
            }
        }
    };
    Ok(EdgeGenerator {
        dim,
        is_correlation: dataset.is_correlation(),
        model,
        warnings,
    })
}

/// Draws one matrix for the pair `(y_i, y_j)` mixed at `lambda`. Labels are
/// class ids for classification generators; the output label is the mixed
/// one-hot vector there and `[(1 - l) y_i + l y_j]` for regression.
pub fn g_mixup_sample<R: Rng + ?Sized>(
    gen: &EdgeGenerator,
    y_i: f64,
    y_j: f64,
    lambda: MixRatio,
    rng: &mut R,
) -> Result<MixedSample> {
    let (mean, std) = gen.edge_law(y_i, y_j, lambda)?;
    let n = gen.dim;
    let mut m = DMatrix::zeros(n, n);
    for p in 0..n {
        for q in p..n {
            let v = if p == q && gen.is_correlation {
                1.0
            } else {
                let z: f64 = StandardNormal.sample(rng);
                mean[(p, q)] + std[(p, q)] * z
            };
            m[(p, q)] = v;
            m[(q, p)] = v;
        }
    }
    let label = match &gen.model {
        EdgeModel::Classes(classes) => {
            let one_hot = |y: f64| {
                let mut v = vec![0.0; classes.len()];
                v[y as usize] = 1.0;
                v
            };
            mix_labels(&one_hot(y_i), &one_hot(y_j), lambda)?
        }
        EdgeModel::Conditional { .. } => mix_labels(&[y_i], &[y_j], lambda)?,
    };
    let mut provenance = Provenance::new(Strategy::GMixup);
    provenance.lambda = Some(lambda.value());
    provenance.warnings = gen.warnings.len() as u32;
    Ok(MixedSample {
        matrix: SymmetricMatrix::mirrored(m),
        label,
        provenance,
    })
}

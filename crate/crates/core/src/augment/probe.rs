use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use super::mixup::EigenCache;
use crate::data::{LabeledDataset, Task};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, exp_from_eigen, SymmetricMatrix};

/// Entrywise L1 distances between the true middle sample and its linear
/// (`dv`) and geodesic (`dr`) reconstructions from the outer two.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeSummary {
    pub trials: usize,
    pub mean_dv: f64,
    pub mean_dr: f64,
    pub std_dv: f64,
    pub std_dr: f64,
}

impl ProbeSummary {
    /// `(mean_dv - mean_dr) / mean_dv`.
    pub fn relative_gap(&self) -> f64 {
        (self.mean_dv - self.mean_dr) / self.mean_dv
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn l1(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum()
}

/// Per trial, draws three samples with strictly ordered labels
/// `y1 < y2 < y3`, sets `w = (y2 - y3) / (y1 - y3)` and compares
/// `w X1 + (1 - w) X3` and `exp(w log X1 + (1 - w) log X3)` against `X2`.
pub fn incorrect_label_probe<R: Rng + ?Sized>(
    dataset: &LabeledDataset,
    trials: usize,
    rng: &mut R,
) -> Result<ProbeSummary> {
    if trials == 0 {
        return Err(Error::param("trials", "must be positive"));
    }
    if dataset.task() != Task::Regression {
        return Err(Error::Incompatible("the label probe needs a regression dataset".into()));
    }
    let y = dataset.labels();
    let mut distinct: Vec<f64> = y.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientLabels {
            needed: 3,
            found: distinct.len(),
        });
    }

    let triples: Vec<[usize; 3]> = (0..trials)
        .map(|_| loop {
            let mut t: Vec<usize> = sample(rng, y.len(), 3).into_vec();
            t.sort_by(|&a, &b| y[a].total_cmp(&y[b]));
            if y[t[0]] < y[t[1]] && y[t[1]] < y[t[2]] {
                break [t[0], t[1], t[2]];
            }
        })
        .collect();

    let cache = EigenCache::build(&dataset.spd_matrices()?)?;
    let distances = triples
        .par_iter()
        .map(|&[a, b, c]| {
            let w = (y[b] - y[c]) / (y[a] - y[c]);
            let (xa, xb, xc) = (dataset.matrix(a), dataset.matrix(b), dataset.matrix(c));
            let vmix = xa.matrix() * w + xc.matrix() * (1.0 - w);
            let (la, lc) = (cache.entries()[a].log_matrix(), cache.entries()[c].log_matrix());
            let tangent = SymmetricMatrix::mirrored(la.matrix() * w + lc.matrix() * (1.0 - w));
            let rmix = exp_from_eigen(&eig_sym(&tangent)?)?;
            Ok((l1(&vmix, xb.matrix()), l1(rmix.matrix(), xb.matrix())))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let dv: Vec<f64> = distances.iter().map(|d| d.0).collect();
    let dr: Vec<f64> = distances.iter().map(|d| d.1).collect();
    let (mean_dv, std_dv) = mean_std(&dv);
    let (mean_dr, std_dr) = mean_std(&dr);
    Ok(ProbeSummary {
        trials,
        mean_dv,
        mean_dr,
        std_dv,
        std_dr,
    })
}

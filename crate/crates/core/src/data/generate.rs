//! Synthetic data. Every generator is a pure function of its parameters and
//! the supplied RNG state.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::dataset::{LabeledDataset, Task};
use crate::error::{Error, Result};
use crate::linalg::{matrix_exp, recompose_spectrum, SpdMatrix, SymmetricMatrix};
use crate::spdness::SeriesMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DatasetStructure {
    /// `S(y) = exp(B + y H + E)` with `y ~ U[0, 1]`; `E` is a per-sample
    /// symmetric perturbation of spectral scale `noise` (zero gives an exact
    /// geodesic family).
    LogLinear { noise: f64 },
    /// Well separated class centers in log-space with per-sample jitter of
    /// spectral scale `spread`.
    Clustered { classes: usize, spread: f64 },
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Symmetric Gaussian matrix whose spectral radius is roughly `2 * scale`.
pub fn symmetric_gaussian<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> SymmetricMatrix {
    let g = gaussian_matrix(n, n, rng);
    let s = scale / (2.0 * n as f64).sqrt();
    SymmetricMatrix::mirrored((&g + g.transpose()) * s)
}

/// Random SPD matrix `O diag(mu) O^T` with Haar-like `O` (QR of a Gaussian
/// matrix) and log-uniform eigenvalues whose extremes are pinned so the
/// condition number equals `condition_target`.
pub fn gen_random_spd<R: Rng + ?Sized>(
    n: usize,
    condition_target: f64,
    rng: &mut R,
) -> Result<SpdMatrix> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if !(condition_target >= 1.0) || !condition_target.is_finite() {
        return Err(Error::param("condition_target", "must be finite and >= 1"));
    }
    let qr = gaussian_matrix(n, n, rng).qr();
    let r_diag = qr.r().diagonal();
    let mut q = qr.q();
    for (k, d) in r_diag.iter().enumerate() {
        if *d < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    let half = 0.5 * condition_target.ln();
    let mut logs: Vec<f64> = (0..n).map(|_| rng.gen_range(-half..=half)).collect();
    if n >= 2 {
        logs[0] = -half;
        logs[n - 1] = half;
    } else {
        logs[0] = 0.0;
    }
    let values: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    SpdMatrix::new(recompose_spectrum(&q, &values))
}

/// `n x t` series made of `latent_rank` Gaussian sources mixed linearly, plus
/// i.i.d. Gaussian noise of standard deviation `noise`.
pub fn gen_synthetic_series<R: Rng + ?Sized>(
    n: usize,
    t: usize,
    latent_rank: usize,
    noise: f64,
    rng: &mut R,
) -> Result<SeriesMatrix> {
    if latent_rank == 0 || latent_rank > n {
        return Err(Error::param("latent_rank", format!("must be in 1..={n}")));
    }
    if !(noise >= 0.0) {
        return Err(Error::param("noise", "must be nonnegative"));
    }
    let mixing = gaussian_matrix(n, latent_rank, rng);
    let sources = gaussian_matrix(latent_rank, t, rng);
    let mut x = mixing * sources;
    if noise > 0.0 {
        x += gaussian_matrix(n, t, rng) * noise;
    }
    SeriesMatrix::new(x)
}

pub fn gen_labeled_dataset<R: Rng + ?Sized>(
    n: usize,
    count: usize,
    task: Task,
    structure: DatasetStructure,
    rng: &mut R,
) -> Result<LabeledDataset> {
    if count < 2 {
        return Err(Error::param("count", "must be at least 2"));
    }
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let mut matrices = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    match structure {
        DatasetStructure::LogLinear { noise } => {
            let base = symmetric_gaussian(n, 0.5, rng);
            let direction = symmetric_gaussian(n, 1.0, rng);
            for _ in 0..count {
                let y: f64 = rng.gen();
                let mut tangent = base.matrix() + direction.matrix() * y;
                if noise > 0.0 {
                    tangent += symmetric_gaussian(n, noise, rng).into_matrix();
                }
                let s = matrix_exp(&SymmetricMatrix::mirrored(tangent))?;
                matrices.push(s.into_symmetric());
                labels.push(match task {
                    Task::Regression => y,
                    Task::Classification => f64::from(u8::from(y >= 0.5)),
                });
            }
        }
        DatasetStructure::Clustered { classes, spread } => {
            if classes < 1 {
                return Err(Error::param("classes", "must be at least 1"));
            }
            let centers: Vec<SymmetricMatrix> =
                (0..classes).map(|_| symmetric_gaussian(n, 3.0, rng)).collect();
            for i in 0..count {
                let c = i % classes;
                let jitter = symmetric_gaussian(n, spread, rng);
                let tangent = SymmetricMatrix::mirrored(centers[c].matrix() + jitter.matrix());
                matrices.push(matrix_exp(&tangent)?.into_symmetric());
                labels.push(c as f64);
            }
        }
    }
    LabeledDataset::new(matrices, labels, task, false)
}

use nalgebra::{DMatrix, DVector};

use crate::data::{LabeledDataset, Task};
use crate::error::{Error, Result};
use crate::linalg::{matrix_log, SpdMatrix, SymmetricMatrix};

/// Upper triangle of `h`, row by row, with off-diagonal entries scaled by
/// `sqrt(2)` so that dot products equal Frobenius inner products.
pub fn log_vectorize(h: &SymmetricMatrix) -> DVector<f64> {
    let n = h.dim();
    let mut v = Vec::with_capacity(n * (n + 1) / 2);
    for p in 0..n {
        v.push(h.get(p, p));
        for q in p + 1..n {
            v.push(std::f64::consts::SQRT_2 * h.get(p, q));
        }
    }
    DVector::from_vec(v)
}

/// Affine model `y = beta . vec(log S) + intercept`, fitted by least squares
/// with the minimum-norm `beta` when the system is underdetermined.
#[derive(Clone, Debug)]
pub struct GeodesicRegression {
    dim: usize,
    coefficients: DVector<f64>,
    intercept: f64,
}

impl GeodesicRegression {
    pub fn fit(train: &LabeledDataset) -> Result<Self> {
        if train.task() != Task::Regression {
            return Err(Error::Incompatible("geodesic regression needs regression labels".into()));
        }
        Self::fit_samples(&train.spd_matrices()?, train.labels())
    }

    pub fn fit_samples(samples: &[SpdMatrix], labels: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty);
        }
        if samples.len() != labels.len() {
            return Err(Error::LabelCountMismatch {
                matrices: samples.len(),
                labels: labels.len(),
            });
        }
        let dim = samples[0].dim();
        let rows = samples
            .iter()
            .map(|s| {
                samples[0].ensure_same_dim(s)?;
                Ok(log_vectorize(&matrix_log(s)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let count = rows.len();
        let features = rows[0].len();
        let x = DMatrix::from_fn(count, features, |r, c| rows[r][c]);
        let x_mean = x.row_mean().transpose();
        let y = DVector::from_column_slice(labels);
        let y_mean = y.mean();
        let mut xc = x;
        for mut row in xc.row_iter_mut() {
            row -= x_mean.transpose();
        }
        let yc = y.add_scalar(-y_mean);
        let svd = xc.svd(true, true);
        let top = svd.singular_values.max();
        let eps = if top > 0.0 { 1e-12 * top * count.max(features) as f64 } else { 0.0 };
        let coefficients = if top > 0.0 {
            svd.solve(&yc, eps).map_err(|e| Error::Incompatible(e.to_string()))?
        } else {
            DVector::zeros(features)
        };
        let intercept = y_mean - coefficients.dot(&x_mean);
        Ok(Self {
            dim,
            coefficients,
            intercept,
        })
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.coefficients
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn predict(&self, s: &SpdMatrix) -> Result<f64> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: s.dim(),
            });
        }
        Ok(self.coefficients.dot(&log_vectorize(&matrix_log(s)?)) + self.intercept)
    }
}

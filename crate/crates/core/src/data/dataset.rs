use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{SpdMatrix, SymmetricMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Task {
    Classification,
    Regression,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Classification => "classification",
            Task::Regression => "regression",
        })
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classification" => Ok(Task::Classification),
            "regression" => Ok(Task::Regression),
            other => Err(Error::param("task", format!("unknown task `{other}`"))),
        }
    }
}

/// Matrices of one dimension with aligned scalar labels.
///
/// Classification labels are class ids stored as integral `f64` values in
/// `[0, C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    matrices: Vec<SymmetricMatrix>,
    labels: Vec<f64>,
    ids: Vec<u64>,
    task: Task,
    is_correlation: bool,
}

impl LabeledDataset {
    /// Ids default to `0..len`.
    pub fn new(
        matrices: Vec<SymmetricMatrix>,
        labels: Vec<f64>,
        task: Task,
        is_correlation: bool,
    ) -> Result<Self> {
        let ids = (0..matrices.len() as u64).collect();
        Self::with_ids(matrices, labels, ids, task, is_correlation)
    }

    pub fn with_ids(
        matrices: Vec<SymmetricMatrix>,
        labels: Vec<f64>,
        ids: Vec<u64>,
        task: Task,
        is_correlation: bool,
    ) -> Result<Self> {
        if matrices.len() != labels.len() || ids.len() != labels.len() {
            return Err(Error::LabelCountMismatch {
                matrices: matrices.len(),
                labels: labels.len().min(ids.len()),
            });
        }
        if let Some(first) = matrices.first() {
            for m in &matrices[1..] {
                first.ensure_same_dim(m)?;
            }
        }
        for &y in &labels {
            if !y.is_finite() {
                return Err(Error::param("labels", "labels must be finite"));
            }
            if task == Task::Classification && (y < 0.0 || y.fract() != 0.0) {
                return Err(Error::param(
                    "labels",
                    format!("class id {y} is not a nonnegative integer"),
                ));
            }
        }
        Ok(Self {
            matrices,
            labels,
            ids,
            task,
            is_correlation,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Matrix dimension, `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.matrices.first().map(SymmetricMatrix::dim)
    }

    pub fn matrices(&self) -> &[SymmetricMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, i: usize) -> &SymmetricMatrix {
        &self.matrices[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn is_correlation(&self) -> bool {
        self.is_correlation
    }

    pub fn num_classes(&self) -> usize {
        match self.task {
            Task::Classification => self
                .labels
                .iter()
                .map(|&y| y as usize + 1)
                .max()
                .unwrap_or(0),
            Task::Regression => 0,
        }
    }

    /// One-hot vector for classification, `[y]` for regression.
    pub fn target(&self, i: usize) -> Vec<f64> {
        match self.task {
            Task::Classification => {
                let mut v = vec![0.0; self.num_classes()];
                v[self.labels[i] as usize] = 1.0;
                v
            }
            Task::Regression => vec![self.labels[i]],
        }
    }

    /// Validates every matrix as SPD.
    pub fn spd_matrices(&self) -> Result<Vec<SpdMatrix>> {
        use rayon::prelude::*;
        self.matrices
            .par_iter()
            .map(|m| SpdMatrix::new(m.clone()))
            .collect()
    }

    pub fn label_std(&self) -> f64 {
        let n = self.labels.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let mean = self.labels.iter().sum::<f64>() / n;
        (self.labels.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_misaligned_and_mixed_dims() {
        let a = SymmetricMatrix::identity(2);
        let b = SymmetricMatrix::identity(3);
        assert!(LabeledDataset::new(vec![a.clone()], vec![], Task::Regression, false).is_err());
        assert!(LabeledDataset::new(vec![a, b], vec![0.0, 1.0], Task::Regression, false).is_err());
    }

    #[test]
    fn class_ids_validated() {
        let a = SymmetricMatrix::identity(2);
        assert!(LabeledDataset::new(vec![a.clone()], vec![0.5], Task::Classification, false).is_err());
        assert!(LabeledDataset::new(vec![a.clone()], vec![-1.0], Task::Classification, false).is_err());
        let d = LabeledDataset::new(vec![a.clone(), a], vec![0.0, 2.0], Task::Classification, false)
            .unwrap();
        assert_eq!(d.num_classes(), 3);
        assert_eq!(d.target(1), vec![0.0, 0.0, 1.0]);
    }
}

use nalgebra::{DMatrix, DVector};

use super::kernel::{unit_kernel, KernelConfig, KernelPoint};
use crate::data::{LabeledDataset, Task};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_symmetric, eig_sym, CholeskyFactor, SpdMatrix, SymmetricMatrix};

/// Jitter added to the diagonal, in order, when the Gram matrix will not
/// factor.
pub const JITTER_LADDER: [f64; 3] = [0.0, 1e-10, 1e-8];

/// Pairwise kernel values over a training set, `K(Si, Si) = 1`.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    entries: SymmetricMatrix,
}

impl GramMatrix {
    pub fn new(samples: &[SpdMatrix], config: &KernelConfig) -> Result<Self> {
        config.validate()?;
        let points = prepare(samples, config)?;
        Self::from_points(&points, config.sigma)
    }

    fn from_points(points: &[KernelPoint], sigma: f64) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut g = DMatrix::identity(n, n);
        for a in 0..n {
            for b in a + 1..n {
                let k = unit_kernel(points[a].distance(&points[b])?, sigma);
                g[(a, b)] = k;
                g[(b, a)] = k;
            }
        }
        Ok(Self {
            entries: SymmetricMatrix::mirrored(g),
        })
    }

    pub fn entries(&self) -> &SymmetricMatrix {
        &self.entries
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eig_sym(&self.entries)?.min())
    }
}

fn prepare(samples: &[SpdMatrix], config: &KernelConfig) -> Result<Vec<KernelPoint>> {
    samples.iter().map(|s| KernelPoint::new(s, config.space)).collect()
}

/// `m(S) = sum_k alpha_k K(S_k, S)` with `alpha = (G + ridge I)^-1 y`.
#[derive(Clone, Debug)]
pub struct KernelPredictor {
    config: KernelConfig,
    points: Vec<KernelPoint>,
    labels: DVector<f64>,
    weights: DVector<f64>,
    jitter: f64,
}

impl KernelPredictor {
    pub fn fit(train: &LabeledDataset, config: &KernelConfig) -> Result<Self> {
        if train.task() != Task::Regression {
            return Err(Error::Incompatible("kernel ridge needs regression labels".into()));
        }
        Self::fit_samples(&train.spd_matrices()?, train.labels(), config)
    }

    pub fn fit_samples(samples: &[SpdMatrix], labels: &[f64], config: &KernelConfig) -> Result<Self> {
        config.validate()?;
        if samples.len() != labels.len() {
            return Err(Error::LabelCountMismatch {
                matrices: samples.len(),
                labels: labels.len(),
            });
        }
        let points = prepare(samples, config)?;
        let gram = GramMatrix::from_points(&points, config.sigma)?;
        if config.ridge == 0.0 {
            for a in 0..points.len() {
                for b in a + 1..points.len() {
                    if points[a].distance(&points[b])? <= 1e-10 {
                        return Err(Error::SingularGram { jitter: 0.0 });
                    }
                }
            }
        }
        let (factor, jitter) = factor_with_jitter(gram.entries(), config.ridge)?;
        let labels = DVector::from_column_slice(labels);
        let weights = factor.solve(&labels);
        Ok(Self {
            config: *config,
            points,
            labels,
            weights,
            jitter,
        })
    }

    pub fn config(&self) -> &KernelConfig {
        &self.config
    }

    pub fn training_labels(&self) -> &DVector<f64> {
        &self.labels
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    /// Diagonal jitter that was needed on top of the ridge.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Kernel values `K(S_k, s)` against every training sample.
    pub fn kernel_vector(&self, s: &SpdMatrix) -> Result<DVector<f64>> {
        let p = KernelPoint::new(s, self.config.space)?;
        let mut v = DVector::zeros(self.points.len());
        for (k, q) in self.points.iter().enumerate() {
            v[k] = unit_kernel(q.distance(&p)?, self.config.sigma);
        }
        Ok(v)
    }

    pub fn predict(&self, s: &SpdMatrix) -> Result<f64> {
        Ok(self.weights.dot(&self.kernel_vector(s)?))
    }
}

fn factor_with_jitter(g: &SymmetricMatrix, ridge: f64) -> Result<(CholeskyFactor, f64)> {
    let n = g.dim();
    for jitter in JITTER_LADDER {
        let shifted = SymmetricMatrix::mirrored(g.matrix() + DMatrix::identity(n, n) * (ridge + jitter));
        if let Ok(f) = cholesky_symmetric(&shifted) {
            return Ok((f, jitter));
        }
    }
    Err(Error::SingularGram {
        jitter: JITTER_LADDER[JITTER_LADDER.len() - 1],
    })
}

/// Closed-form two-sample kernel regression
/// `((y_i - K_ij y_j) K_iS + (y_j - K_ij y_i) K_jS) / (1 - K_ij^2)`,
/// with unit-diagonal kernel values.
pub fn predict_two_sample(y_i: f64, y_j: f64, k_ij: f64, k_is: f64, k_js: f64) -> Result<f64> {
    if k_ij >= 1.0 {
        return Err(Error::CoincidentSamples {
            i: 0,
            j: 1,
            kernel: k_ij,
        });
    }
    if !(k_ij > 0.0) || !(k_is > 0.0) || !(k_js > 0.0) {
        return Err(Error::param("kernel", "kernel values must be positive"));
    }
    // Grouped by label so that S = Si (or Sj) reproduces its label exactly.
    let denom = 1.0 - k_ij * k_ij;
    let w_i = (k_is - k_ij * k_js) / denom;
    let w_j = (k_js - k_ij * k_is) / denom;
    Ok(w_i * y_i + w_j * y_j)
}

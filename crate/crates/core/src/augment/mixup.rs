use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use super::drop::EdgeMask;
use super::sampling::bernoulli;
use super::{mix_labels, MixedSample, Provenance, Strategy};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, exp_from_eigen, SpdMatrix, SymmetricMatrix};
use crate::metrics::{geodesic, MetricKind, MixRatio};

/// Eigenvectors and log-eigenvalues of one sample.
#[derive(Clone, Debug)]
pub struct CacheEntry {
    orthogonal: DMatrix<f64>,
    log_eigenvalues: DVector<f64>,
}

impl CacheEntry {
    pub fn new(s: &SpdMatrix) -> Result<Self> {
        let eig = eig_sym(s)?;
        if eig.min() <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: eig.min(),
            });
        }
        Ok(Self {
            log_eigenvalues: eig.eigenvalues().map(f64::ln),
            orthogonal: eig.orthogonal().clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.log_eigenvalues.len()
    }

    pub fn orthogonal(&self) -> &DMatrix<f64> {
        &self.orthogonal
    }

    pub fn log_eigenvalues(&self) -> &DVector<f64> {
        &self.log_eigenvalues
    }

    /// `O diag(w * log mu) O^T` without symmetrization.
    fn weighted_log(&self, w: f64) -> DMatrix<f64> {
        let mut scaled = self.orthogonal.clone();
        for (k, &m) in self.log_eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(w * m);
        }
        scaled * self.orthogonal.transpose()
    }

    /// `log S` recomposed from the entry.
    pub fn log_matrix(&self) -> SymmetricMatrix {
        SymmetricMatrix::mirrored(self.weighted_log(1.0))
    }
}

/// Per-sample decompositions, computed once and read-only afterwards.
#[derive(Clone, Debug, Default)]
pub struct EigenCache {
    entries: Vec<CacheEntry>,
}

impl EigenCache {
    pub fn build(samples: &[SpdMatrix]) -> Result<Self> {
        let entries = samples
            .par_iter()
            .map(CacheEntry::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&CacheEntry> {
        self.entries.get(i)
    }

    pub fn entries(&self) -> &[CacheEntry] {
        &self.entries
    }
}

fn pairwise(strategy: Strategy, matrix: SymmetricMatrix, label: Vec<f64>, lambda: MixRatio) -> MixedSample {
    let mut provenance = Provenance::new(strategy);
    provenance.lambda = Some(lambda.value());
    MixedSample {
        matrix,
        label,
        provenance,
    }
}

/// Log-Euclidean geodesic mix. Decomposes both inputs and the tangent mix,
/// three eigendecompositions in total.
pub fn r_mixup(
    s_i: &SpdMatrix,
    s_j: &SpdMatrix,
    y_i: &[f64],
    y_j: &[f64],
    lambda: MixRatio,
) -> Result<MixedSample> {
    let label = mix_labels(y_i, y_j, lambda)?;
    let m = geodesic(s_i, s_j, lambda, MetricKind::LogEuclidean)?;
    let mut out = pairwise(Strategy::RMixup, m.into_symmetric(), label, lambda);
    out.provenance.spd_validated = true;
    Ok(out)
}

/// Same result as [`r_mixup`] from cached decompositions, with a single
/// eigendecomposition of `(1-l) Oi diag(log mu) Oi^T + l Oj diag(log nu) Oj^T`.
pub fn r_mixup_cached(
    c_i: &CacheEntry,
    c_j: &CacheEntry,
    y_i: &[f64],
    y_j: &[f64],
    lambda: MixRatio,
) -> Result<MixedSample> {
    if c_i.dim() != c_j.dim() {
        return Err(Error::DimensionMismatch {
            expected: c_i.dim(),
            found: c_j.dim(),
        });
    }
    let label = mix_labels(y_i, y_j, lambda)?;
    let l = lambda.value();
    let tangent = SymmetricMatrix::mirrored(c_i.weighted_log(1.0 - l) + c_j.weighted_log(l));
    let m = exp_from_eigen(&eig_sym(&tangent)?).map_err(|e| e.with_metric(MetricKind::LogEuclidean))?;
    let mut out = pairwise(Strategy::RMixup, m.into_symmetric(), label, lambda);
    out.provenance.spd_validated = true;
    Ok(out)
}

/// Straight-line mix. The output is left unvalidated.
pub fn v_mixup(
    s_i: &SymmetricMatrix,
    s_j: &SymmetricMatrix,
    y_i: &[f64],
    y_j: &[f64],
    lambda: MixRatio,
) -> Result<MixedSample> {
    let label = mix_labels(y_i, y_j, lambda)?;
    let m = SymmetricMatrix::lerp(s_i, s_j, lambda.value())?;
    Ok(pairwise(Strategy::VMixup, m, label, lambda))
}

/// Each upper-triangle entry (diagonal included) comes from `Sj` with
/// probability `lambda`, otherwise from `Si`; the choice is mirrored.
pub fn d_mixup<R: Rng + ?Sized>(
    s_i: &SymmetricMatrix,
    s_j: &SymmetricMatrix,
    y_i: &[f64],
    y_j: &[f64],
    lambda: MixRatio,
    rng: &mut R,
) -> Result<MixedSample> {
    s_i.ensure_same_dim(s_j)?;
    let mask = EdgeMask::from_upper_fn(s_i.dim(), |_, _| bernoulli(lambda.value(), rng));
    d_mixup_with_mask(s_i, s_j, y_i, y_j, lambda, &mask)
}

/// `(1 - mask) . Si + mask . Sj` entrywise.
pub fn d_mixup_with_mask(
    s_i: &SymmetricMatrix,
    s_j: &SymmetricMatrix,
    y_i: &[f64],
    y_j: &[f64],
    lambda: MixRatio,
    mask: &EdgeMask,
) -> Result<MixedSample> {
    s_i.ensure_same_dim(s_j)?;
    let n = s_i.dim();
    if mask.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: mask.dim(),
        });
    }
    let label = mix_labels(y_i, y_j, lambda)?;
    let m = DMatrix::from_fn(n, n, |p, q| if mask.get(p, q) { s_j.get(p, q) } else { s_i.get(p, q) });
    let mut out = pairwise(Strategy::DMixup, SymmetricMatrix::mirrored(m), label, lambda);
    out.provenance.mask = Some(mask.upper_count(true));
    Ok(out)
}

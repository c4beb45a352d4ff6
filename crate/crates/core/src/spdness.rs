//! Covariance and correlation matrices from multivariate series, spectral
//! clamping, and SPD-ness diagnostics.
//!
//! Covariance uses the `1/t` normalizer. Because of mean-centering its rank
//! is at most `min(n, t - 1)`, so strict positive definiteness needs
//! `t >= n + 1` samples.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, recompose_spectrum, SpdMatrix, SymmetricMatrix};

/// Default replacement for non-positive eigenvalues.
pub const DEFAULT_CLAMP_FLOOR: f64 = 1e-6;

/// Eigenvalues above this count as positive in SPD-ness reports.
pub const POSITIVITY_THRESHOLD: f64 = 1e-6;

/// `n` variables observed over `t` steps (rows are variables). Every row has
/// positive variance.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix {
    values: DMatrix<f64>,
}

impl SeriesMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::Empty);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        for (row, r) in values.row_iter().enumerate() {
            let first = r[0];
            if r.iter().all(|&v| v == first) {
                return Err(Error::ConstantRow { row });
            }
        }
        Ok(Self { values })
    }

    pub fn n_vars(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_steps(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }
}

/// `Cov_pq = (1/t) sum_k (x_pk - mean_p)(x_qk - mean_q)`.
pub fn covariance(x: &SeriesMatrix) -> Result<SymmetricMatrix> {
    let t = x.n_steps();
    if t < 2 {
        return Err(Error::param("t", "covariance needs at least 2 steps"));
    }
    let mut centered = x.values.clone();
    for mut row in centered.row_iter_mut() {
        let mean = row.sum() / t as f64;
        row.add_scalar_mut(-mean);
    }
    let cov = (&centered * centered.transpose()) / t as f64;
    let out = SymmetricMatrix::mirrored(cov);
    for p in 0..out.dim() {
        if out.get(p, p) <= 0.0 {
            return Err(Error::ConstantRow { row: p });
        }
    }
    Ok(out)
}

/// Pearson correlation: `D^-1/2 Cov D^-1/2` with an exactly unit diagonal.
pub fn correlation(x: &SeriesMatrix) -> Result<SymmetricMatrix> {
    let cov = covariance(x)?;
    let n = cov.dim();
    let inv_sd: Vec<f64> = (0..n).map(|p| 1.0 / cov.get(p, p).sqrt()).collect();
    let mut m = cov.into_matrix();
    for p in 0..n {
        for q in 0..n {
            m[(p, q)] = if p == q {
                1.0
            } else {
                (m[(p, q)] * inv_sd[p] * inv_sd[q]).clamp(-1.0, 1.0)
            };
        }
    }
    Ok(SymmetricMatrix::mirrored(m))
}

/// Spectral repair: eigenvalues `<= 0` become `floor`, everything else is
/// kept. Returns the matrix and the number of modes replaced; an input that
/// needs no repair is returned unchanged.
pub fn clamp_to_spd_counted(s: &SymmetricMatrix, floor: f64) -> Result<(SpdMatrix, usize)> {
    if !(floor > 0.0) || !floor.is_finite() {
        return Err(Error::param("floor", "must be positive and finite"));
    }
    let eig = eig_sym(s)?;
    let values: Vec<f64> = eig.eigenvalues().iter().copied().collect();
    let clamped = values.iter().filter(|&&m| m <= 0.0).count();
    if clamped == 0 {
        return Ok((
            SpdMatrix::from_spectrum_unchecked(s.clone(), eig.min(), eig.max()),
            0,
        ));
    }
    let repaired: Vec<f64> = values
        .iter()
        .map(|&m| if m <= 0.0 { floor } else { m })
        .collect();
    let lo = repaired.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = repaired.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let out = recompose_spectrum(eig.orthogonal(), &repaired);
    Ok((SpdMatrix::from_spectrum_unchecked(out, lo, hi), clamped))
}

pub fn clamp_to_spd(s: &SymmetricMatrix, floor: f64) -> Result<SpdMatrix> {
    clamp_to_spd_counted(s, floor).map(|(m, _)| m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpdnessReport {
    pub n: usize,
    pub t: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub positive_count: usize,
    pub spdness_pct: f64,
    /// `min(n, t - 1)`.
    pub rank_bound: usize,
    pub is_spd: bool,
}

impl SpdnessReport {
    pub fn rank_bound_respected(&self) -> bool {
        self.positive_count <= self.rank_bound
    }
}

/// Percentage of eigenvalues above [`POSITIVITY_THRESHOLD`] for a matrix
/// built from `n` variables over `t` steps.
pub fn spdness_report(s: &SymmetricMatrix, n: usize, t: usize) -> Result<SpdnessReport> {
    if s.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.dim(),
        });
    }
    let eig = eig_sym(s)?;
    let eigenvalues: Vec<f64> = eig.eigenvalues().iter().copied().collect();
    let positive_count = eigenvalues
        .iter()
        .filter(|&&m| m > POSITIVITY_THRESHOLD)
        .count();
    Ok(SpdnessReport {
        n,
        t,
        eigenvalues,
        positive_count,
        spdness_pct: 100.0 * positive_count as f64 / n as f64,
        rank_bound: n.min(t.saturating_sub(1)),
        is_spd: positive_count == n,
    })
}

/// Block means over `n_steps / target_t` consecutive steps.
pub fn downsample_by_averaging(x: &SeriesMatrix, target_t: usize) -> Result<SeriesMatrix> {
    let len = x.n_steps();
    if target_t == 0 || !len.is_multiple_of(target_t) {
        return Err(Error::NotADivisor {
            target: target_t,
            len,
        });
    }
    let block = len / target_t;
    let v = &x.values;
    let out = DMatrix::from_fn(x.n_vars(), target_t, |p, k| {
        v.row(p).columns(k * block, block).sum() / block as f64
    });
    SeriesMatrix::new(out)
}

/// First `target_t` steps.
pub fn truncate(x: &SeriesMatrix, target_t: usize) -> Result<SeriesMatrix> {
    let len = x.n_steps();
    if target_t > len {
        return Err(Error::TooLong {
            target: target_t,
            len,
        });
    }
    if target_t == 0 {
        return Err(Error::param("target_t", "must be positive"));
    }
    SeriesMatrix::new(x.values.columns(0, target_t).into_owned())
}

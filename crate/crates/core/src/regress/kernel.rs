use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{matrix_log, SpdMatrix, SymmetricMatrix};
use crate::metrics::log_euclidean_distance;

/// Which distance feeds the Gaussian kernel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KernelSpace {
    /// Log-Euclidean geodesic distance on the manifold.
    #[default]
    Riemannian,
    /// Frobenius distance between the raw matrices.
    Euclidean,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelConfig {
    pub sigma: f64,
    pub ridge: f64,
    pub space: KernelSpace,
}

impl KernelConfig {
    pub fn new(sigma: f64) -> Result<Self> {
        let c = Self {
            sigma,
            ridge: 0.0,
            space: KernelSpace::Riemannian,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        check_sigma(self.sigma)?;
        if !(self.ridge >= 0.0) || !self.ridge.is_finite() {
            return Err(Error::param("ridge", "must be nonnegative and finite"));
        }
        Ok(())
    }
}

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::param("sigma", "must be positive and finite"))
    }
}

/// `exp(-d^2 / (2 sigma^2))`, the kernel without its normalizer. Equals 1
/// at zero distance.
pub fn unit_kernel(distance: f64, sigma: f64) -> f64 {
    (-distance * distance / (2.0 * sigma * sigma)).exp()
}

/// Log of the manifold heat kernel
/// `(2 pi sigma^2)^(-n(n-1)/4) exp(-d^2 / (2 sigma^2))`. The normalizer
/// under- or overflows for large `n`, so this is the primary form.
pub fn log_heat_kernel(s_i: &SpdMatrix, s_hat: &SpdMatrix, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let d = log_euclidean_distance(s_i, s_hat)?;
    let n = s_i.dim() as f64;
    Ok(-n * (n - 1.0) / 4.0 * (2.0 * PI * sigma * sigma).ln() - d * d / (2.0 * sigma * sigma))
}

pub fn heat_kernel(s_i: &SpdMatrix, s_hat: &SpdMatrix, sigma: f64) -> Result<f64> {
    log_heat_kernel(s_i, s_hat, sigma).map(f64::exp)
}

/// `(2 pi sigma^2)^(-n/2) exp(-||Si - S||_F^2 / (2 sigma^2))`.
pub fn euclidean_kernel(s_i: &SymmetricMatrix, s_hat: &SymmetricMatrix, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    s_i.ensure_same_dim(s_hat)?;
    let d = (s_i.matrix() - s_hat.matrix()).norm();
    let n = s_i.dim() as f64;
    Ok((-n / 2.0 * (2.0 * PI * sigma * sigma).ln() - d * d / (2.0 * sigma * sigma)).exp())
}

/// A sample prepared for repeated kernel evaluation: its log for the
/// manifold kernel, the raw matrix for the Euclidean one.
#[derive(Clone, Debug)]
pub(crate) struct KernelPoint(SymmetricMatrix);

impl KernelPoint {
    pub(crate) fn new(s: &SpdMatrix, space: KernelSpace) -> Result<Self> {
        Ok(Self(match space {
            KernelSpace::Riemannian => matrix_log(s)?,
            KernelSpace::Euclidean => s.as_symmetric().clone(),
        }))
    }

    pub(crate) fn distance(&self, other: &KernelPoint) -> Result<f64> {
        self.0.ensure_same_dim(&other.0)?;
        Ok((self.0.matrix() - other.0.matrix()).norm())
    }
}

/// Median of all pairwise distances in `space`, a common bandwidth choice.
pub fn median_pairwise_distance(samples: &[SpdMatrix], space: KernelSpace) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::param("samples", "need at least 2 samples"));
    }
    let points = samples
        .iter()
        .map(|s| KernelPoint::new(s, space))
        .collect::<Result<Vec<_>>>()?;
    let mut d = Vec::with_capacity(points.len() * (points.len() - 1) / 2);
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            d.push(points[a].distance(&points[b])?);
        }
    }
    d.sort_by(f64::total_cmp);
    let m = d.len();
    Ok(if m % 2 == 1 { d[m / 2] } else { 0.5 * (d[m / 2 - 1] + d[m / 2]) })
}

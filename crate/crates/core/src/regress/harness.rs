//! Compares the two-sample kernel predictor on geodesic and straight-line
//! mixes of the same pair.
//!
//! For a pair `(Si, yi), (Sj, yj)` and each `lambda`, the mixed label is
//! `y~ = (1 - l) yi + l yj`. The predictor fitted on the pair is evaluated at
//! the log-Euclidean mix `S~` and at the straight-line mix `S~'`. The claim
//! under test is that the geodesic square loss never exceeds the line one,
//! together with the ordering `0 <= m(S~') <= m(S~) <= y~`.

use std::fmt;

use super::kernel::{unit_kernel, KernelConfig, KernelPoint};
use super::ridge::predict_two_sample;
use crate::error::{Error, Result};
use crate::linalg::{SpdMatrix, SymmetricMatrix};
use crate::metrics::{geodesic, MetricKind, MixRatio};

/// Slack for the square-loss and ordering comparisons.
pub const LOSS_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossComparisonRow {
    pub lambda: f64,
    pub y_mix: f64,
    pub pred_geodesic: f64,
    pub pred_line: f64,
    pub err_geodesic: f64,
    pub err_line: f64,
    /// `err_geodesic > err_line + slack`.
    pub violation: bool,
    /// `0 <= pred_line <= pred_geodesic <= y_mix`, each within the slack.
    pub ordering_holds: bool,
}

impl fmt::Display for LossComparisonRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lambda={:.6} y~={:.12} m(geodesic)={:.12} m(line)={:.12} err_geodesic={:.3e} err_line={:.3e}",
            self.lambda, self.y_mix, self.pred_geodesic, self.pred_line, self.err_geodesic, self.err_line
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LossComparison {
    pub y_i: f64,
    pub y_j: f64,
    /// Distance between the endpoints in the kernel's space.
    pub distance: f64,
    pub k_ij: f64,
    pub rows: Vec<LossComparisonRow>,
}

impl LossComparison {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violation).count()
    }

    pub fn ordering_failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.ordering_holds).count()
    }

    pub fn first_failure(&self) -> Option<&LossComparisonRow> {
        self.rows.iter().find(|r| r.violation || !r.ordering_holds)
    }
}

pub fn loss_comparison(
    s_i: &SpdMatrix,
    s_j: &SpdMatrix,
    y_i: f64,
    y_j: f64,
    lambdas: &[f64],
    config: &KernelConfig,
) -> Result<LossComparison> {
    config.validate()?;
    s_i.ensure_same_dim(s_j)?;
    for y in [y_i, y_j] {
        if !(y >= 0.0) {
            return Err(Error::NegativeLabel { value: y });
        }
    }
    let (p_i, p_j) = (KernelPoint::new(s_i, config.space)?, KernelPoint::new(s_j, config.space)?);
    let distance = p_i.distance(&p_j)?;
    let k_ij = unit_kernel(distance, config.sigma);
    if distance <= 1e-10 || k_ij >= 1.0 {
        return Err(Error::CoincidentSamples { i: 0, j: 1, kernel: k_ij });
    }
    let predict = |s: &SpdMatrix| -> Result<f64> {
        let p = KernelPoint::new(s, config.space)?;
        let k_is = unit_kernel(p_i.distance(&p)?, config.sigma);
        let k_js = unit_kernel(p_j.distance(&p)?, config.sigma);
        predict_two_sample(y_i, y_j, k_ij, k_is, k_js)
    };

    let rows = lambdas
        .iter()
        .map(|&l| {
            let lambda = MixRatio::new(l)?;
            let y_mix = (1.0 - l) * y_i + l * y_j;
            let on_geodesic = geodesic(s_i, s_j, lambda, MetricKind::LogEuclidean)?;
            let on_line = SpdMatrix::new(SymmetricMatrix::lerp(s_i, s_j, l)?)?;
            let pred_geodesic = predict(&on_geodesic)?;
            let pred_line = predict(&on_line)?;
            let err_geodesic = (pred_geodesic - y_mix).powi(2);
            let err_line = (pred_line - y_mix).powi(2);
            Ok(LossComparisonRow {
                lambda: l,
                y_mix,
                pred_geodesic,
                pred_line,
                err_geodesic,
                err_line,
                violation: err_geodesic > err_line + LOSS_SLACK,
                ordering_holds: -LOSS_SLACK <= pred_line
                    && pred_line <= pred_geodesic + LOSS_SLACK
                    && pred_geodesic <= y_mix + LOSS_SLACK,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LossComparison {
        y_i,
        y_j,
        distance,
        k_ij,
        rows,
    })
}

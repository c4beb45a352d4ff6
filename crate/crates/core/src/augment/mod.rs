//! Augmentation strategies for labeled SPD datasets.
//!
//! | strategy  | output                                   | SPD guaranteed |
//! |-----------|------------------------------------------|----------------|
//! | rmixup    | `exp((1-l) log Si + l log Sj)`            | yes            |
//! | vmixup    | `(1-l) Si + l Sj`                          | not validated  |
//! | dmixup    | per-edge choice between `Si` and `Sj`      | no             |
//! | dropnode  | rows and columns of dropped nodes zeroed   | no             |
//! | dropedge  | off-diagonal entries zeroed at random      | no             |
//! | gmixup    | edges drawn from fitted Gaussian models    | no             |
//! | cmixup    | vmixup with a label-similar partner        | not validated  |

mod batch;
mod cmixup;
mod drop;
mod gmixup;
mod mixup;
mod probe;
mod sampling;

use std::fmt;
use std::str::FromStr;

pub use batch::{augment_batch, BatchOutput};
pub use cmixup::{c_mixup_pair, PartnerChoice};
pub use drop::{drop_edge, drop_edge_with_mask, drop_node, drop_node_with_mask, EdgeMask};
pub use gmixup::{g_mixup_fit, g_mixup_sample, ClassEdgeStats, EdgeGenerator};
pub use mixup::{d_mixup, d_mixup_with_mask, r_mixup, r_mixup_cached, v_mixup, CacheEntry, EigenCache};
pub use probe::{incorrect_label_probe, ProbeSummary};
pub use sampling::{sample_beta, stream_rng};

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::metrics::MixRatio;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    RMixup,
    VMixup,
    DMixup,
    DropNode,
    DropEdge,
    GMixup,
    CMixup,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::RMixup,
        Strategy::VMixup,
        Strategy::DMixup,
        Strategy::DropNode,
        Strategy::DropEdge,
        Strategy::GMixup,
        Strategy::CMixup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::RMixup => "rmixup",
            Strategy::VMixup => "vmixup",
            Strategy::DMixup => "dmixup",
            Strategy::DropNode => "dropnode",
            Strategy::DropEdge => "dropedge",
            Strategy::GMixup => "gmixup",
            Strategy::CMixup => "cmixup",
        }
    }

    /// Whether the strategy combines two samples.
    pub fn is_pairwise(self) -> bool {
        !matches!(self, Strategy::DropNode | Strategy::DropEdge)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::param("strategy", format!("unknown strategy `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixConfig {
    pub strategy: Strategy,
    /// Shape of the symmetric Beta distribution for `lambda`.
    pub alpha: f64,
    /// Keep probability for the drop strategies.
    pub keep_prob: f64,
    /// Label-kernel width for C-Mixup; `None` means the label standard deviation.
    pub cmix_bandwidth: Option<f64>,
    pub seed: u64,
    pub use_eigencache: bool,
}

impl Default for MixConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::RMixup,
            alpha: 1.0,
            keep_prob: 0.8,
            cmix_bandwidth: None,
            seed: 0,
            use_eigencache: true,
        }
    }
}

impl MixConfig {
    pub fn new(strategy: Strategy) -> Self {
        Self {
            strategy,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::param("alpha", "must be positive and finite"));
        }
        check_keep_prob(self.keep_prob)?;
        if let Some(bw) = self.cmix_bandwidth {
            check_bandwidth(bw)?;
        }
        Ok(())
    }
}

pub(crate) fn check_keep_prob(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::param("keep_prob", "must lie strictly between 0 and 1"))
    }
}

pub(crate) fn check_bandwidth(bw: f64) -> Result<()> {
    if bw > 0.0 && bw.is_finite() {
        Ok(())
    } else {
        Err(Error::param("cmix_bandwidth", "must be positive and finite"))
    }
}

/// Where an augmented sample came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub strategy: Strategy,
    /// Dataset ids of the first and (for pairwise strategies) second source.
    pub sources: (Option<u64>, Option<u64>),
    pub lambda: Option<f64>,
    /// Mask entries (or nodes) kept and the total drawn, for masked strategies.
    pub mask: Option<(usize, usize)>,
    /// The matrix passed strict SPD validation.
    pub spd_validated: bool,
    /// Near-singular spectra or degenerate fits met on the way.
    pub warnings: u32,
}

impl Provenance {
    pub(crate) fn new(strategy: Strategy) -> Self {
        Self {
            strategy,
            sources: (None, None),
            lambda: None,
            mask: None,
            spd_validated: false,
            warnings: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedSample {
    pub matrix: SymmetricMatrix,
    /// `[y]` for regression, a probability vector for classification.
    pub label: Vec<f64>,
    pub provenance: Provenance,
}

impl MixedSample {
    pub fn with_sources(mut self, i: u64, j: Option<u64>) -> Self {
        self.provenance.sources = (Some(i), j);
        self
    }
}

/// `(1 - l) y_i + l y_j`, entrywise.
pub fn mix_labels(y_i: &[f64], y_j: &[f64], lambda: MixRatio) -> Result<Vec<f64>> {
    if y_i.len() != y_j.len() {
        return Err(Error::DimensionMismatch {
            expected: y_i.len(),
            found: y_j.len(),
        });
    }
    let l = lambda.value();
    Ok(y_i.iter().zip(y_j).map(|(a, b)| (1.0 - l) * a + l * b).collect())
}

//! Geometry and augmentation for datasets of symmetric positive definite
//! matrices.
//!
//! The centerpiece is mixing along log-Euclidean geodesics:
//! `exp((1 - lambda) log S_i + lambda log S_j)`, which always stays on the
//! manifold and never inflates determinants. Around it sit the four other
//! classic SPD metrics, baseline mixing strategies, correlation-matrix
//! diagnostics, heat-kernel regression and a small binary container format.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod augment;
pub mod data;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod regress;
pub mod spdness;

pub use augment::{EigenCache, MixConfig, MixedSample, Strategy};
pub use data::{LabeledDataset, Task};
pub use error::{Error, Result};
pub use linalg::{CholeskyFactor, EigenDecomposition, SpdMatrix, SymmetricMatrix};
pub use metrics::{MetricKind, MixRatio, SwellingReport};
pub use regress::{KernelConfig, KernelPredictor, KernelSpace};
pub use spdness::{SeriesMatrix, SpdnessReport};

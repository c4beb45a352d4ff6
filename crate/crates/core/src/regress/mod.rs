//! Gaussian kernels on the SPD manifold, kernel ridge regression, linear
//! regression in log coordinates, and the geodesic-versus-line loss
//! comparison.

mod geodesic;
mod harness;
mod kernel;
mod ridge;

pub use geodesic::{log_vectorize, GeodesicRegression};
pub use harness::{loss_comparison, LossComparison, LossComparisonRow, LOSS_SLACK};
pub use kernel::{
    euclidean_kernel, heat_kernel, log_heat_kernel, median_pairwise_distance, unit_kernel, KernelConfig,
    KernelSpace,
};
pub use ridge::{predict_two_sample, GramMatrix, KernelPredictor, JITTER_LADDER};

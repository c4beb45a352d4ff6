use rand::Rng;

use super::check_bandwidth;
use crate::data::{LabeledDataset, Task};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartnerChoice {
    pub index: usize,
    /// The anchor had no admissible partner and was paired with itself.
    pub fallback: bool,
}

/// Picks a partner `j != anchor` with probability proportional to
/// `exp(-(y_i - y_j)^2 / (2 bandwidth^2))`. For classification this reduces
/// to a uniform choice within the anchor's class.
pub fn c_mixup_pair<R: Rng + ?Sized>(
    dataset: &LabeledDataset,
    anchor: usize,
    bandwidth: f64,
    rng: &mut R,
) -> Result<PartnerChoice> {
    check_bandwidth(bandwidth)?;
    if dataset.len() < 2 {
        return Err(Error::Incompatible("C-Mixup needs at least 2 samples".into()));
    }
    if anchor >= dataset.len() {
        return Err(Error::param("anchor", format!("index {anchor} out of range")));
    }
    let y = dataset.labels();
    let y_a = y[anchor];
    match dataset.task() {
        Task::Classification => {
            let same: Vec<usize> = (0..y.len()).filter(|&j| j != anchor && y[j] == y_a).collect();
            if same.is_empty() {
                return Ok(PartnerChoice {
                    index: anchor,
                    fallback: true,
                });
            }
            Ok(PartnerChoice {
                index: same[rng.gen_range(0..same.len())],
                fallback: false,
            })
        }
        Task::Regression => {
            // log-sum-exp so a tiny bandwidth cannot underflow every weight
            let logits: Vec<f64> = y
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    if j == anchor {
                        f64::NEG_INFINITY
                    } else {
                        -(y_a - v).powi(2) / (2.0 * bandwidth * bandwidth)
                    }
                })
                .collect();
            let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = logits.iter().map(|&z| (z - top).exp()).collect();
            let total: f64 = weights.iter().sum();
            let mut u = rng.gen::<f64>() * total;
            let mut last = anchor;
            for (j, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                last = j;
                if u < w {
                    break;
                }
                u -= w;
            }
            Ok(PartnerChoice {
                index: last,
                fallback: false,
            })
        }
    }
}

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::metrics::MixRatio;

/// `lambda ~ Beta(alpha, alpha)`.
pub fn sample_beta<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<MixRatio> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::param("alpha", "must be positive and finite"));
    }
    let beta = Beta::new(alpha, alpha).map_err(|e| Error::param("alpha", e.to_string()))?;
    MixRatio::new(beta.sample(rng).clamp(0.0, 1.0))
}

/// Independent stream for output `index` under `seed`. Every sample of a
/// batch draws from its own stream so results do not depend on scheduling.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `true` with probability `p`. `p = 0` never fires and `p = 1` always does.
pub(crate) fn bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    rng.gen::<f64>() < p
}

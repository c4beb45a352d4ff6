//! Shared fixtures for the benchmarks.

use spd_augment::augment::{sample_beta, stream_rng};
use spd_augment::data::gen_random_spd;
use spd_augment::{MixRatio, SpdMatrix};

/// `pairs` random SPD pairs of dimension `n` (condition number 1e3) with a
/// uniform mixing ratio per pair, reproducible from `seed`.
pub fn pairs(n: usize, pairs: usize, seed: u64) -> Vec<(SpdMatrix, SpdMatrix, MixRatio)> {
    let mut rng = stream_rng(seed, n as u64);
    (0..pairs)
        .map(|_| {
            let a = gen_random_spd(n, 1e3, &mut rng).expect("valid generator parameters");
            let b = gen_random_spd(n, 1e3, &mut rng).expect("valid generator parameters");
            let l = sample_beta(1.0, &mut rng).expect("valid alpha");
            (a, b, l)
        })
        .collect()
}

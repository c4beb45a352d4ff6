//! End-to-end use of the public API: generate, store, reload, augment,
//! diagnose.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spd_augment::augment::{augment_batch, r_mixup, v_mixup};
use spd_augment::data::{
    gen_labeled_dataset, gen_random_spd, gen_synthetic_series, read_matrices, read_series_csv, write_matrices,
    write_series_csv, DatasetStructure, SeriesLayout,
};
use spd_augment::linalg::{det, eig_sym, log_det, relative_frobenius_error};
use spd_augment::metrics::{geodesic, log_euclidean_distance, swelling_check, SwellingReport};
use spd_augment::spdness::{clamp_to_spd, correlation, spdness_report, DEFAULT_CLAMP_FLOOR};
use spd_augment::{Error, MetricKind, MixConfig, MixRatio, SpdMatrix, Strategy, Task};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn stored_dataset_augments_identically_after_reload() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("train.spdb");
    let ds = gen_labeled_dataset(6, 40, Task::Regression, DatasetStructure::LogLinear { noise: 0.05 }, &mut rng(1))
        .unwrap();
    write_matrices(&path, &ds).unwrap();
    let back = read_matrices(&path).unwrap();
    assert_eq!(back, ds);

    let config = MixConfig {
        seed: 42,
        ..MixConfig::new(Strategy::RMixup)
    };
    let a = augment_batch(&ds, &config, 30).unwrap();
    let b = augment_batch(&back, &config, 30).unwrap();
    assert_eq!(a.samples, b.samples);
    for s in &a.samples {
        assert!(s.provenance.spd_validated);
        let (i, j) = (s.provenance.sources.0.unwrap() as usize, s.provenance.sources.1.unwrap() as usize);
        let l = s.provenance.lambda.unwrap();
        let expected = (1.0 - l) * ds.label(i) + l * ds.label(j);
        assert!((s.label[0] - expected).abs() < 1e-15);
    }
}

#[test]
fn truncated_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.spdb");
    let ds = gen_labeled_dataset(3, 4, Task::Regression, DatasetStructure::LogLinear { noise: 0.0 }, &mut rng(2))
        .unwrap();
    write_matrices(&path, &ds).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
    assert!(matches!(read_matrices(&path), Err(Error::TruncatedPayload { .. })));
}

#[test]
fn series_file_to_mixed_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(3);
    let mut corr = Vec::new();
    for k in 0..2 {
        let x = gen_synthetic_series(5, 12, 5, 0.3, &mut r).unwrap();
        let path = dir.path().join(format!("s{k}.csv"));
        write_series_csv(&path, &x, SeriesLayout::VarsAsRows).unwrap();
        let back = read_series_csv(&path, SeriesLayout::VarsAsRows).unwrap();
        assert_eq!(back, x);
        let c = correlation(&back).unwrap();
        let report = spdness_report(&c, 5, 12).unwrap();
        assert!(report.rank_bound_respected());
        corr.push(clamp_to_spd(&c, DEFAULT_CLAMP_FLOOR).unwrap());
    }
    let mixed = r_mixup(&corr[0], &corr[1], &[0.0], &[1.0], MixRatio::new(0.3).unwrap()).unwrap();
    let spd = SpdMatrix::new(mixed.matrix).unwrap();
    let ld = log_det(&spd).unwrap();
    let expected = 0.7 * log_det(&corr[0]).unwrap() + 0.3 * log_det(&corr[1]).unwrap();
    assert!((ld - expected).abs() < 1e-9 * (1.0 + expected.abs()));
}

#[test]
fn determinant_example_from_two_fixed_matrices() {
    // dets 5.40 and 6.46: the midpoint determinant is their geometric mean
    let a = SpdMatrix::from_diagonal(&[2.0, 2.7]).unwrap();
    let b = SpdMatrix::from_diagonal(&[3.4, 1.9]).unwrap();
    assert!((det(&a).unwrap() - 5.40).abs() < 1e-12);
    assert!((det(&b).unwrap() - 6.46).abs() < 1e-12);
    let half = MixRatio::new(0.5).unwrap();
    let m = geodesic(&a, &b, half, MetricKind::LogEuclidean).unwrap();
    assert!((det(&m).unwrap() - (5.40f64 * 6.46).sqrt()).abs() < 1e-9);
    assert!(swelling_check(&a, &b, half, MetricKind::LogEuclidean).unwrap().within_bounds);
    let r = SwellingReport::from_log_dets(5.40f64.ln(), 6.46f64.ln(), 6.6f64.ln());
    assert!(r.exceeds_max && !r.within_bounds);
}

#[test]
fn clustered_classes_are_separable() {
    let ds = gen_labeled_dataset(
        4,
        60,
        Task::Classification,
        DatasetStructure::Clustered { classes: 2, spread: 0.2 },
        &mut rng(4),
    )
    .unwrap();
    let spd = ds.spd_matrices().unwrap();
    let (train, test) = (0..40, 40..60);
    for t in test {
        let nearest = train
            .clone()
            .min_by(|&a, &b| {
                let da = log_euclidean_distance(&spd[t], &spd[a]).unwrap();
                let db = log_euclidean_distance(&spd[t], &spd[b]).unwrap();
                da.total_cmp(&db)
            })
            .unwrap();
        assert_eq!(ds.label(nearest), ds.label(t));
    }
}

#[test]
fn batch_strategies_respect_their_contracts() {
    let ds = gen_labeled_dataset(5, 20, Task::Regression, DatasetStructure::LogLinear { noise: 0.1 }, &mut rng(5))
        .unwrap();
    for strategy in Strategy::ALL {
        let out = augment_batch(&ds, &MixConfig::new(strategy), 16).unwrap();
        assert_eq!(out.samples.len(), 16, "{strategy}");
        for s in &out.samples {
            assert_eq!(s.provenance.strategy, strategy);
            assert_eq!(s.label.len(), 1);
            assert_eq!(s.matrix.dim(), 5);
            if strategy.is_pairwise() {
                assert!(s.provenance.lambda.is_some(), "{strategy}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn geodesic_mix_is_never_farther_than_its_endpoints(seed in any::<u64>(), l in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let a = gen_random_spd(4, 50.0, &mut r).unwrap();
        let b = gen_random_spd(4, 50.0, &mut r).unwrap();
        let m = r_mixup(&a, &b, &[0.0], &[1.0], MixRatio::new(l).unwrap()).unwrap();
        let m = SpdMatrix::new(m.matrix).unwrap();
        let d = log_euclidean_distance(&a, &b).unwrap();
        let da = log_euclidean_distance(&a, &m).unwrap();
        let db = log_euclidean_distance(&m, &b).unwrap();
        prop_assert!((da + db - d).abs() <= 1e-8 * (1.0 + d));
    }

    #[test]
    fn linear_mix_of_spd_stays_spd(seed in any::<u64>(), l in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let a = gen_random_spd(5, 1e3, &mut r).unwrap();
        let b = gen_random_spd(5, 1e3, &mut r).unwrap();
        let m = v_mixup(&a, &b, &[0.0], &[1.0], MixRatio::new(l).unwrap()).unwrap();
        prop_assert!(eig_sym(&m.matrix).unwrap().min() > 0.0);
    }

    #[test]
    fn stored_matrices_round_trip(seed in any::<u64>(), n in 1usize..6, count in 2usize..6) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.spdb");
        let ds = gen_labeled_dataset(n, count, Task::Regression, DatasetStructure::LogLinear { noise: 0.2 }, &mut rng(seed))
            .unwrap();
        write_matrices(&path, &ds).unwrap();
        let back = read_matrices(&path).unwrap();
        prop_assert_eq!(back.len(), ds.len());
        for (x, y) in back.matrices().iter().zip(ds.matrices()) {
            prop_assert_eq!(relative_frobenius_error(x.matrix(), y.matrix()), 0.0);
        }
    }
}

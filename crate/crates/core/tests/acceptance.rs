//! Acceptance suite. Runs every criterion in sequence (so timings are not
//! disturbed by each other), prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.
//!
//! Pass a substring as the first argument to run a subset.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spd_augment::augment::{incorrect_label_probe, r_mixup, r_mixup_cached, CacheEntry};
use spd_augment::data::generate::{gen_labeled_dataset, gen_random_spd, gen_synthetic_series};
use spd_augment::data::{read_matrices, write_matrices, DatasetStructure};
use spd_augment::linalg::{
    eig_sym, eigendecomposition_count, matrix_exp, matrix_log, relative_frobenius_error,
    reset_eigendecomposition_count,
};
use spd_augment::metrics::{geodesic, log_concavity_margin, log_euclidean_distance, swelling_check};
use spd_augment::regress::{loss_comparison, median_pairwise_distance, GramMatrix, KernelConfig, KernelPredictor, KernelSpace};
use spd_augment::spdness::{correlation, covariance, spdness_report};
use spd_augment::{LabeledDataset, MetricKind, MixRatio, SpdMatrix, SymmetricMatrix, Task};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ratio(l: f64) -> MixRatio {
    MixRatio::new(l).unwrap()
}

fn log_det(s: &SymmetricMatrix) -> f64 {
    eig_sym(s).unwrap().eigenvalues().iter().map(|m| m.ln()).sum()
}

const LAMBDAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// 500 pairs split evenly over the dimensions of the determinant sweep.
fn determinant_sweep_pairs() -> Vec<(SpdMatrix, SpdMatrix)> {
    let mut r = rng(1);
    let mut pairs = Vec::with_capacity(500);
    for n in [2, 8, 50, 120] {
        for _ in 0..125 {
            let draw = |r: &mut ChaCha8Rng| {
                let s = gen_random_spd(n, 10f64.powf(r.gen_range(0.0..4.0)), r).unwrap();
                // spread the determinants so the [min, max] band is not degenerate
                let scale = r.gen_range(-1.0f64..1.0).exp();
                SpdMatrix::from_matrix(s.matrix() * scale).unwrap()
            };
            pairs.push((draw(&mut r), draw(&mut r)));
        }
    }
    pairs
}

fn c01_determinant_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut checks = 0;
    for (a, b) in determinant_sweep_pairs() {
        let (la, lb) = (log_det(&a), log_det(&b));
        for l in LAMBDAS {
            let m = geodesic(&a, &b, ratio(l), MetricKind::LogEuclidean).map_err(|e| e.to_string())?;
            let lm = log_det(&m);
            let expected = (1.0 - l) * la + l * lb;
            let err = (lm - expected).abs() / (1.0 + expected.abs().max(la.abs()).max(lb.abs()));
            worst = worst.max(err);
            checks += 1;
            if err > 1e-8 {
                return Err(format!("n={} lambda={l}: log det {lm} vs {expected}", a.dim()));
            }
        }
    }
    Ok(format!("{checks} checks, worst scaled error {worst:.2e}"))
}

fn c02_no_swelling() -> Outcome {
    let mut checks = 0;
    for (a, b) in determinant_sweep_pairs() {
        for l in LAMBDAS {
            for metric in [MetricKind::LogEuclidean, MetricKind::AffineInvariant] {
                let r = swelling_check(&a, &b, ratio(l), metric).map_err(|e| e.to_string())?;
                checks += 1;
                if !r.within_bounds {
                    return Err(format!("{metric} n={} lambda={l}: {r:?}", a.dim()));
                }
            }
        }
    }
    // same spectrum, independent rotations: equal determinants at both ends
    let mut r = rng(2);
    let mut exceed = 0;
    for _ in 0..1000 {
        let n = r.gen_range(2..=6);
        let base = gen_random_spd(n, 50.0, &mut r).unwrap();
        let e = eig_sym(&base).unwrap();
        let q = gen_random_spd(n, 2.0, &mut r).unwrap();
        let rot = eig_sym(&q).unwrap().orthogonal().clone();
        let rotated = SpdMatrix::from_matrix(&rot * e.reconstruct().matrix() * rot.transpose()).unwrap();
        let report = swelling_check(&base, &rotated, ratio(r.gen_range(0.2..0.8)), MetricKind::Euclidean)
            .map_err(|e| e.to_string())?;
        exceed += usize::from(report.exceeds_max);
    }
    if exceed == 0 {
        return Err("no Euclidean exceedance among 1000 rotated pairs".into());
    }
    Ok(format!("{checks} bounded checks; Euclidean exceeded the max in {exceed}/1000 rotated pairs"))
}

fn c03_holder_direction() -> Outcome {
    let mut checks = 0;
    let mut tightest = f64::INFINITY;
    for (a, b) in determinant_sweep_pairs() {
        for l in LAMBDAS {
            let le = geodesic(&a, &b, ratio(l), MetricKind::LogEuclidean).map_err(|e| e.to_string())?;
            let eu = geodesic(&a, &b, ratio(l), MetricKind::Euclidean).map_err(|e| e.to_string())?;
            let (dl, de) = (log_det(&le), log_det(&eu));
            // det_le <= det_eu (1 + 1e-9), compared in log space
            let margin = de + 1e-9f64.ln_1p() - dl;
            tightest = tightest.min(margin);
            checks += 1;
            if margin < 0.0 {
                return Err(format!("n={} lambda={l}: log det LE {dl} > Euclidean {de}", a.dim()));
            }
        }
    }
    Ok(format!("{checks} checks, tightest log margin {tightest:.2e}"))
}

fn c04_roundtrips() -> Outcome {
    let mut r = rng(4);
    let mut worst_el = 0.0f64;
    let mut worst_le = 0.0f64;
    for n in [2, 8, 50, 120, 360] {
        for kappa in [1.0, 1e2, 1e4, 1e6] {
            let s = gen_random_spd(n, kappa, &mut r).unwrap();
            let log_s = matrix_log(&s).map_err(|e| e.to_string())?;
            let back = matrix_exp(&log_s).map_err(|e| e.to_string())?;
            let err = relative_frobenius_error(back.matrix(), s.matrix());
            worst_el = worst_el.max(err);
            if err > 1e-8 {
                return Err(format!("exp(log S) n={n} kappa={kappa:e}: {err:e}"));
            }
            // log of a fresh SPD matrix, so exp(H) has condition number exactly kappa
            let h = matrix_log(&gen_random_spd(n, kappa, &mut r).unwrap()).map_err(|e| e.to_string())?;
            let round = matrix_log(&matrix_exp(&h).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let err = (round.matrix() - h.matrix()).norm() / h.frobenius_norm().max(1.0);
            worst_le = worst_le.max(err);
            if err > 1e-8 {
                return Err(format!("log(exp H) n={n}: {err:e}"));
            }
        }
    }
    Ok(format!("worst exp(log) {worst_el:.2e}, worst log(exp) {worst_le:.2e}"))
}

fn c05_endpoints() -> Outcome {
    let mut r = rng(5);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let n = [2, 3, 5, 8][k % 4];
        let a = gen_random_spd(n, 100.0, &mut r).unwrap();
        let b = gen_random_spd(n, 100.0, &mut r).unwrap();
        for metric in MetricKind::ALL {
            let start = geodesic(&a, &b, MixRatio::ZERO, metric).map_err(|e| e.to_string())?;
            let end = geodesic(&a, &b, MixRatio::ONE, metric).map_err(|e| e.to_string())?;
            let e0 = relative_frobenius_error(start.matrix(), a.matrix());
            let e1 = relative_frobenius_error(end.matrix(), b.matrix());
            worst = worst.max(e0).max(e1);
            if e0 > 1e-8 || e1 > 1e-8 {
                return Err(format!("{metric} pair {k}: errors {e0:e} / {e1:e}"));
            }
        }
    }
    Ok(format!("200 pairs x 5 metrics, worst {worst:.2e}"))
}

fn c06_distance_scaling() -> Outcome {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let n = [2, 4, 8][k % 3];
        let a = gen_random_spd(n, 1e3, &mut r).unwrap();
        let b = gen_random_spd(n, 1e3, &mut r).unwrap();
        let d = log_euclidean_distance(&a, &b).map_err(|e| e.to_string())?;
        for step in 0..=10 {
            let l = step as f64 / 10.0;
            let m = geodesic(&a, &b, ratio(l), MetricKind::LogEuclidean).map_err(|e| e.to_string())?;
            let dl = log_euclidean_distance(&a, &m).map_err(|e| e.to_string())?;
            let err = (dl - l * d).abs();
            worst = worst.max(err);
            if err > 1e-8 {
                return Err(format!("pair {k} lambda={l}: {dl} vs {}", l * d));
            }
        }
    }
    Ok(format!("200 pairs x 11 lambdas, worst {worst:.2e}"))
}

fn c07_loss_comparison() -> Outcome {
    let mut r = rng(7);
    let mut violations = 0;
    let mut ordering = 0;
    let mut first = None;
    let trials_per_dim = 500;
    for n in [4, 8] {
        let pool: Vec<SpdMatrix> = (0..2 * trials_per_dim)
            .map(|_| gen_random_spd(n, 100.0, &mut r).unwrap())
            .collect();
        let sigma = median_pairwise_distance(&pool[..100], KernelSpace::Riemannian).map_err(|e| e.to_string())?;
        let config = KernelConfig::new(sigma).map_err(|e| e.to_string())?;
        for t in 0..trials_per_dim {
            let (a, b) = (&pool[2 * t], &pool[2 * t + 1]);
            let (yi, yj): (f64, f64) = (r.gen(), r.gen());
            let l: f64 = r.gen();
            let table = loss_comparison(a, b, yi, yj, &[l], &config).map_err(|e| e.to_string())?;
            let row = table.rows[0];
            violations += usize::from(row.violation);
            ordering += usize::from(!row.ordering_holds);
            if first.is_none() && (row.violation || !row.ordering_holds) {
                first = Some(format!("n={n} yi={yi:.4} yj={yj:.4} {row}"));
            }
        }
    }
    if violations == 0 && ordering == 0 {
        Ok("1000 trials, no violations".into())
    } else {
        Err(format!(
            "{violations}/1000 square-loss violations, {ordering}/1000 ordering failures; first: {}",
            first.unwrap_or_default()
        ))
    }
}

fn c08_log_concavity() -> Outcome {
    let mut r = rng(8);
    let mut worst = f64::INFINITY;
    for k in 0..500 {
        let n = [2, 4, 8, 16][k % 4];
        let a = gen_random_spd(n, 100.0, &mut r).unwrap();
        let b = gen_random_spd(n, 100.0, &mut r).unwrap();
        let l: f64 = r.gen();
        let m = log_concavity_margin(&a, &b, ratio(l)).map_err(|e| e.to_string())?;
        worst = worst.min(m);
        if m < -1e-9 {
            return Err(format!("pair {k} lambda={l}: min eigenvalue {m:e}"));
        }
    }
    Ok(format!("500 pairs, smallest margin {worst:.2e}"))
}

fn c09_rank_law_and_sweep() -> Outcome {
    let mut r = rng(9);
    for _ in 0..200 {
        let n = r.gen_range(2..=30);
        let t = r.gen_range(2..=40);
        let x = gen_synthetic_series(n, t, r.gen_range(1..=n), r.gen_range(0.0..0.5), &mut r).unwrap();
        let cov = covariance(&x).map_err(|e| e.to_string())?;
        let e = eig_sym(&cov).unwrap();
        let tol = 1e-10 * cov.trace();
        let rank = e.eigenvalues().iter().filter(|&&m| m > tol).count();
        if rank > n.min(t - 1) {
            return Err(format!("n={n} t={t}: rank {rank}"));
        }
    }
    let n = 360;
    let mut means = Vec::new();
    for t in (90..=900).step_by(90) {
        let mut total = 0.0;
        for _ in 0..20 {
            let x = gen_synthetic_series(n, t, n, 0.5, &mut r).unwrap();
            let rep = spdness_report(&correlation(&x).map_err(|e| e.to_string())?, n, t).map_err(|e| e.to_string())?;
            if !rep.rank_bound_respected() {
                return Err(format!("t={t}: {} positive eigenvalues", rep.positive_count));
            }
            total += rep.spdness_pct;
        }
        means.push((t, total / 20.0));
    }
    let curve: Vec<String> = means.iter().map(|(t, m)| format!("{t}:{m:.1}")).collect();
    if means.windows(2).any(|w| w[1].1 < w[0].1) {
        return Err(format!("sweep not monotone: {}", curve.join(" ")));
    }
    Ok(format!("rank law on 200 series; n=360 sweep {}", curve.join(" ")))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn c10_cache() -> Outcome {
    let mut r = rng(10);
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut speedup = 0.0;
    for (n, pairs) in [(8, 500), (50, 300), (120, 136), (360, 64)] {
        let samples: Vec<SpdMatrix> = (0..2 * pairs).map(|_| gen_random_spd(n, 1e3, &mut r).unwrap()).collect();
        let cache: Vec<CacheEntry> = samples.iter().map(|s| CacheEntry::new(s).unwrap()).collect();
        let lambdas: Vec<MixRatio> = (0..pairs).map(|_| ratio(r.gen())).collect();
        let reps = if n == 360 { 3 } else { 1 };
        let mut direct_times = Vec::new();
        let mut cached_times = Vec::new();
        for rep in 0..reps {
            let start = Instant::now();
            let mut direct = Vec::with_capacity(pairs);
            for k in 0..pairs {
                reset_eigendecomposition_count();
                direct.push(r_mixup(&samples[2 * k], &samples[2 * k + 1], &[0.0], &[1.0], lambdas[k]).unwrap());
                if eigendecomposition_count() != 3 {
                    return Err(format!("direct path used {} eigendecompositions", eigendecomposition_count()));
                }
            }
            direct_times.push(start.elapsed().as_secs_f64() / pairs as f64);
            let start = Instant::now();
            let mut cached = Vec::with_capacity(pairs);
            for k in 0..pairs {
                reset_eigendecomposition_count();
                cached.push(r_mixup_cached(&cache[2 * k], &cache[2 * k + 1], &[0.0], &[1.0], lambdas[k]).unwrap());
                if eigendecomposition_count() != 1 {
                    return Err(format!("cached path used {} eigendecompositions", eigendecomposition_count()));
                }
            }
            cached_times.push(start.elapsed().as_secs_f64() / pairs as f64);
            if rep == 0 {
                for (d, c) in direct.iter().zip(&cached) {
                    let err = relative_frobenius_error(c.matrix.matrix(), d.matrix.matrix());
                    worst = worst.max(err);
                    checked += 1;
                    if err > 1e-8 {
                        return Err(format!("n={n}: cached differs by {err:e}"));
                    }
                }
            }
        }
        if n == 360 {
            speedup = median(direct_times) / median(cached_times);
        }
    }
    let detail = format!("{checked} pairs, worst {worst:.2e}; eig counts 3 vs 1; n=360 per-mix speedup {speedup:.2}x");
    if speedup >= 1.5 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c11_probe() -> Outcome {
    let exact = gen_labeled_dataset(8, 100, Task::Regression, DatasetStructure::LogLinear { noise: 0.0 }, &mut rng(11))
        .unwrap();
    let s = incorrect_label_probe(&exact, 1000, &mut rng(12)).map_err(|e| e.to_string())?;
    if s.mean_dr > 0.01 * s.mean_dv {
        return Err(format!("exact family: mean_dr {} vs mean_dv {}", s.mean_dr, s.mean_dv));
    }
    let noisy = gen_labeled_dataset(8, 100, Task::Regression, DatasetStructure::LogLinear { noise: 0.1 }, &mut rng(13))
        .unwrap();
    let t = incorrect_label_probe(&noisy, 1000, &mut rng(14)).map_err(|e| e.to_string())?;
    if t.mean_dr >= t.mean_dv || t.mean_dr.is_nan() {
        return Err(format!("noisy family: mean_dr {} vs mean_dv {}", t.mean_dr, t.mean_dv));
    }
    Ok(format!(
        "exact: dr/dv = {:.2e}; noisy: dv {:.3} dr {:.3} gap {:.1}%",
        s.mean_dr / s.mean_dv,
        t.mean_dv,
        t.mean_dr,
        100.0 * t.relative_gap()
    ))
}

fn c12_gram() -> Outcome {
    let mut r = rng(15);
    let samples: Vec<SpdMatrix> = (0..50).map(|_| gen_random_spd(8, 100.0, &mut r).unwrap()).collect();
    let sigma = median_pairwise_distance(&samples, KernelSpace::Riemannian).map_err(|e| e.to_string())?;
    let g = GramMatrix::new(&samples, &KernelConfig::new(sigma).unwrap()).map_err(|e| e.to_string())?;
    let m = g.min_eigenvalue().map_err(|e| e.to_string())?;
    if m > 0.0 {
        Ok(format!("sigma {sigma:.3}, min eigenvalue {m:.3e}"))
    } else {
        Err(format!("min eigenvalue {m:e}"))
    }
}

fn c13_interpolation() -> Outcome {
    let mut r = rng(16);
    let mut worst = 0.0f64;
    for (k, n) in [3, 4, 5, 8, 8, 12].into_iter().enumerate() {
        let samples: Vec<SpdMatrix> = (0..20).map(|_| gen_random_spd(n, 100.0, &mut r).unwrap()).collect();
        let labels: Vec<f64> = (0..20).map(|_| r.gen_range(-1.0..1.0)).collect();
        let ds = LabeledDataset::new(
            samples.iter().map(|s| s.as_symmetric().clone()).collect(),
            labels.clone(),
            Task::Regression,
            false,
        )
        .unwrap();
        let sigma = median_pairwise_distance(&samples, KernelSpace::Riemannian).unwrap();
        let p = KernelPredictor::fit(&ds, &KernelConfig::new(sigma).unwrap()).map_err(|e| e.to_string())?;
        for (s, y) in samples.iter().zip(&labels) {
            let err = (p.predict(s).unwrap() - y).abs();
            worst = worst.max(err);
            if err > 1e-8 {
                return Err(format!("dataset {k}: error {err:e}"));
            }
        }
    }
    Ok(format!("6 datasets of 20 samples, worst {worst:.2e}"))
}

fn c14_format() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut r = rng(17);
    for (n, count, task) in [(1, 0, Task::Regression), (8, 100, Task::Classification), (360, 256, Task::Regression)] {
        let matrices: Vec<SymmetricMatrix> = (0..count)
            .map(|_| {
                // arbitrary bit patterns, not just tidy decimals
                let m = DMatrix::from_fn(n, n, |_, _| r.gen::<f64>() * 10f64.powi(r.gen_range(-300..300)));
                SymmetricMatrix::new(&m + m.transpose()).unwrap()
            })
            .collect();
        let labels: Vec<f64> = (0..count)
            .map(|_| match task {
                Task::Classification => f64::from(r.gen_range(0u8..3)),
                Task::Regression => r.gen(),
            })
            .collect();
        let ds = LabeledDataset::new(matrices, labels, task, false).unwrap();
        let path = dir.path().join(format!("d{n}.spdb"));
        write_matrices(&path, &ds).map_err(|e| e.to_string())?;
        let back = read_matrices(&path).map_err(|e| e.to_string())?;
        let same_bits = back.len() == ds.len()
            && back.task() == ds.task()
            && back.labels().iter().zip(ds.labels()).all(|(a, b)| a.to_bits() == b.to_bits())
            && back
                .matrices()
                .iter()
                .zip(ds.matrices())
                .all(|(a, b)| a.matrix().iter().zip(b.matrix().iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        if !same_bits {
            return Err(format!("n={n} count={count}: roundtrip not bit-exact"));
        }
    }
    Ok("n=1/count=0, n=8/count=100, n=360/count=256 bit-exact".into())
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, title: "log-det is linear along log-Euclidean geodesics", budget: Some(Duration::from_secs(30)), run: c01_determinant_identity },
        Criterion { id: 2, title: "no swelling for log-Euclidean and affine-invariant; Euclidean swells", budget: None, run: c02_no_swelling },
        Criterion { id: 3, title: "log-Euclidean determinant never exceeds Euclidean", budget: None, run: c03_holder_direction },
        Criterion { id: 4, title: "exp/log roundtrips up to n=360, condition 1e6", budget: Some(Duration::from_secs(60)), run: c04_roundtrips },
        Criterion { id: 5, title: "geodesic endpoints for all five metrics", budget: None, run: c05_endpoints },
        Criterion { id: 6, title: "distance scales linearly along geodesics", budget: None, run: c06_distance_scaling },
        Criterion { id: 7, title: "geodesic-mix square loss never exceeds line-mix loss", budget: Some(Duration::from_secs(120)), run: c07_loss_comparison },
        Criterion { id: 8, title: "operator concavity of the matrix logarithm", budget: None, run: c08_log_concavity },
        Criterion { id: 9, title: "covariance rank law and monotone SPD-ness sweep", budget: None, run: c09_rank_law_and_sweep },
        Criterion { id: 10, title: "eigencache equivalence, counts and speedup", budget: Some(Duration::from_secs(180)), run: c10_cache },
        Criterion { id: 11, title: "incorrect-label probe favours geodesic mixing", budget: Some(Duration::from_secs(60)), run: c11_probe },
        Criterion { id: 12, title: "heat-kernel Gram matrix is positive definite", budget: None, run: c12_gram },
        Criterion { id: 13, title: "ridge-free kernel regression interpolates", budget: None, run: c13_interpolation },
        Criterion { id: 14, title: "SPDB write/read is bit-exact", budget: None, run: c14_format },
    ];
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    let mut ran = 0;
    for c in &criteria {
        let label = format!("criterion {:02}: {}", c.id, c.title);
        if let Some(f) = &filter {
            if !label.contains(f.as_str()) {
                continue;
            }
        }
        ran += 1;
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(d), Some(b)) if elapsed > b => Err(format!("{d}; took {elapsed:.1?}, budget {b:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS  {label} [{elapsed:.1?}] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {label} [{elapsed:.1?}] {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

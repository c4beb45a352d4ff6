//! Wall-clock comparison of the three pairwise mixes. Timing loops run
//! sequentially on the calling thread so that the per-mix numbers and the
//! thread-local eigendecomposition counts mean the same thing.

use std::time::Instant;

use serde_json::json;
use spd_augment::augment::{r_mixup, r_mixup_cached, sample_beta, stream_rng, v_mixup, EigenCache};
use spd_augment::data::gen_random_spd;
use spd_augment::linalg::{eigendecomposition_count, reset_eigendecomposition_count};
use spd_augment::{MixRatio, SpdMatrix};

use crate::args::BenchArgs;
use crate::exit::{CliError, CliResult};
use crate::output::{num, Report};

const CONDITION: f64 = 1e3;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Mean seconds per call of `f` over `0..batch`.
fn per_mix<F: FnMut(usize) -> CliResult<()>>(batch: usize, mut f: F) -> CliResult<f64> {
    let start = Instant::now();
    for k in 0..batch {
        f(k)?;
    }
    Ok(start.elapsed().as_secs_f64() / batch as f64)
}

fn eig_count<F: FnOnce() -> CliResult<()>>(f: F) -> CliResult<u64> {
    reset_eigendecomposition_count();
    f()?;
    Ok(eigendecomposition_count())
}

struct Row {
    n: usize,
    direct: f64,
    cached: f64,
    vmixup: f64,
    precompute: f64,
    eig: [u64; 3],
}

fn bench_dim(n: usize, a: &BenchArgs) -> CliResult<Row> {
    let mut rng = stream_rng(a.seed, n as u64);
    let samples: Vec<SpdMatrix> = (0..2 * a.batch)
        .map(|_| gen_random_spd(n, CONDITION, &mut rng))
        .collect::<spd_augment::Result<_>>()?;
    let lambdas: Vec<MixRatio> = (0..a.batch)
        .map(|_| sample_beta(1.0, &mut rng))
        .collect::<spd_augment::Result<_>>()?;
    let (y0, y1) = ([0.0], [1.0]);

    let start = Instant::now();
    let cache = EigenCache::build(&samples)?;
    let precompute = start.elapsed().as_secs_f64();
    let c = cache.entries();

    let direct = |k: usize| -> CliResult<()> {
        r_mixup(&samples[2 * k], &samples[2 * k + 1], &y0, &y1, lambdas[k])?;
        Ok(())
    };
    let cached = |k: usize| -> CliResult<()> {
        r_mixup_cached(&c[2 * k], &c[2 * k + 1], &y0, &y1, lambdas[k])?;
        Ok(())
    };
    let linear = |k: usize| -> CliResult<()> {
        v_mixup(&samples[2 * k], &samples[2 * k + 1], &y0, &y1, lambdas[k])?;
        Ok(())
    };

    let eig = [eig_count(|| direct(0))?, eig_count(|| cached(0))?, eig_count(|| linear(0))?];
    let (mut td, mut tc, mut tv) = (Vec::new(), Vec::new(), Vec::new());
    // interleaved so that drift in machine load hits all three alike
    for _ in 0..a.reps {
        td.push(per_mix(a.batch, direct)?);
        tc.push(per_mix(a.batch, cached)?);
        tv.push(per_mix(a.batch, linear)?);
    }
    Ok(Row {
        n,
        direct: median(td),
        cached: median(tc),
        vmixup: median(tv),
        precompute,
        eig,
    })
}

pub fn run(a: &BenchArgs) -> CliResult<()> {
    if a.n.is_empty() || a.n.contains(&0) {
        return Err(CliError::usage("--n must list positive dimensions"));
    }
    if a.batch == 0 || a.reps == 0 {
        return Err(CliError::usage("--batch and --reps must be positive"));
    }
    let mut out = Report::open(a.output.as_deref())?;
    out.csv.write_record([
        "n", "batch", "reps", "direct_us", "cached_us", "vmixup_us", "precompute_ms", "speedup", "eig_direct",
        "eig_cached", "eig_vmixup",
    ])?;
    let mut speedups = Vec::new();
    for &n in &a.n {
        let r = bench_dim(n, a)?;
        let speedup = r.direct / r.cached;
        eprintln!(
            "n={n}: direct {:.1} us, cached {:.1} us, linear {:.2} us per mix ({speedup:.2}x)",
            r.direct * 1e6,
            r.cached * 1e6,
            r.vmixup * 1e6
        );
        out.csv.write_record([
            r.n.to_string(),
            a.batch.to_string(),
            a.reps.to_string(),
            num(r.direct * 1e6),
            num(r.cached * 1e6),
            num(r.vmixup * 1e6),
            num(r.precompute * 1e3),
            num(speedup),
            r.eig[0].to_string(),
            r.eig[1].to_string(),
            r.eig[2].to_string(),
        ])?;
        speedups.push(json!({"n": n, "speedup": speedup, "eig_direct": r.eig[0], "eig_cached": r.eig[1]}));
    }
    out.finish(json!({"command": "bench", "batch": a.batch, "reps": a.reps, "results": speedups}))
}

//! Geodesic interpolation between SPD matrices under five metrics, the
//! log-Euclidean distance, and determinant ("swelling") diagnostics.
//!
//! | metric             | interpolant                                                          |
//! |--------------------|----------------------------------------------------------------------|
//! | Euclidean          | `(1-l) Si + l Sj`                                                    |
//! | Cholesky           | `((1-l) Li + l Lj)((1-l) Li + l Lj)^T`                               |
//! | Bures-Wasserstein  | `(1-l)^2 Si + l^2 Sj + l(1-l)((Si Sj)^1/2 + (Sj Si)^1/2)`            |
//! | affine-invariant   | `Si^1/2 (Si^-1/2 Sj Si^-1/2)^l Si^1/2`                               |
//! | log-Euclidean      | `exp((1-l) log Si + l log Sj)`                                       |
//!
//! Affine-invariant and Bures-Wasserstein both need `Si^-1/2`; when an
//! intermediate eigenvalue drops below [`STABILITY_EIGENVALUE_FLOOR`] the call
//! records a stability warning instead of failing.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{
    cholesky, eig_sym, exp_from_eigen, matrix_log, power_from_eigen, SpdMatrix,
    SymmetricMatrix,
};

/// Intermediate eigenvalues below this raise a stability warning.
pub const STABILITY_EIGENVALUE_FLOOR: f64 = 1e-10;

/// Relative determinant slack used by [`swelling_check`].
pub const SWELLING_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Euclidean,
    Cholesky,
    BuresWasserstein,
    AffineInvariant,
    LogEuclidean,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] = [
        MetricKind::Euclidean,
        MetricKind::Cholesky,
        MetricKind::BuresWasserstein,
        MetricKind::AffineInvariant,
        MetricKind::LogEuclidean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Cholesky => "cholesky",
            MetricKind::BuresWasserstein => "bures-wasserstein",
            MetricKind::AffineInvariant => "affine-invariant",
            MetricKind::LogEuclidean => "log-euclidean",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::param("metric", format!("unknown metric `{s}`")))
    }
}

/// Interpolation weight in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct MixRatio(f64);

impl MixRatio {
    pub const ZERO: MixRatio = MixRatio(0.0);
    pub const ONE: MixRatio = MixRatio(1.0);

    pub fn new(lambda: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&lambda) {
            Ok(Self(lambda))
        } else {
            Err(Error::param("lambda", format!("{lambda} is outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - lambda`.
    pub fn complement(self) -> MixRatio {
        MixRatio(1.0 - self.0)
    }
}

/// A geodesic point together with the number of near-singular intermediate
/// spectra encountered while computing it.
#[derive(Clone, Debug)]
pub struct Interpolant {
    pub matrix: SpdMatrix,
    pub stability_warnings: u32,
}

pub fn geodesic(
    s_i: &SpdMatrix,
    s_j: &SpdMatrix,
    lambda: MixRatio,
    metric: MetricKind,
) -> Result<SpdMatrix> {
    geodesic_with_diagnostics(s_i, s_j, lambda, metric).map(|g| g.matrix)
}

pub fn geodesic_with_diagnostics(
    s_i: &SpdMatrix,
    s_j: &SpdMatrix,
    lambda: MixRatio,
    metric: MetricKind,
) -> Result<Interpolant> {
    s_i.ensure_same_dim(s_j)?;
    let l = lambda.value();
    let out = match metric {
        MetricKind::Euclidean => {
            SpdMatrix::new(SymmetricMatrix::lerp(s_i, s_j, l)?).map(plain)
        }
        MetricKind::Cholesky => cholesky_geodesic(s_i, s_j, l).map(plain),
        MetricKind::BuresWasserstein => bures_wasserstein_geodesic(s_i, s_j, l),
        MetricKind::AffineInvariant => affine_invariant_geodesic(s_i, s_j, l),
        MetricKind::LogEuclidean => log_euclidean_geodesic(s_i, s_j, l).map(plain),
    };
    out.map_err(|e| e.with_metric(metric))
}

fn plain(matrix: SpdMatrix) -> Interpolant {
    Interpolant {
        matrix,
        stability_warnings: 0,
    }
}

fn warn_if_small(min_eigenvalue: f64) -> u32 {
    u32::from(min_eigenvalue < STABILITY_EIGENVALUE_FLOOR)
}

fn cholesky_geodesic(s_i: &SpdMatrix, s_j: &SpdMatrix, l: f64) -> Result<SpdMatrix> {
    let li = cholesky(s_i)?.into_lower();
    let lj = cholesky(s_j)?.into_lower();
    let mixed = li * (1.0 - l) + lj * l;
    SpdMatrix::new(SymmetricMatrix::mirrored(&mixed * mixed.transpose()))
}

fn log_euclidean_geodesic(s_i: &SpdMatrix, s_j: &SpdMatrix, l: f64) -> Result<SpdMatrix> {
    let log_i = matrix_log(s_i)?;
    let log_j = matrix_log(s_j)?;
    let tangent = SymmetricMatrix::lerp(&log_i, &log_j, l)?;
    exp_from_eigen(&eig_sym(&tangent)?)
}

fn affine_invariant_geodesic(s_i: &SpdMatrix, s_j: &SpdMatrix, l: f64) -> Result<Interpolant> {
    let eig_i = eig_sym(s_i)?;
    let mut warnings = warn_if_small(eig_i.min());
    let half = power_from_eigen(&eig_i, 0.5)?;
    let inv_half = power_from_eigen(&eig_i, -0.5)?;
    let inner = SymmetricMatrix::mirrored(inv_half.matrix() * s_j.matrix() * inv_half.matrix());
    let eig_inner = eig_sym(&inner)?;
    warnings += warn_if_small(eig_inner.min());
    let inner_pow = power_from_eigen(&eig_inner, l)?;
    let out = SymmetricMatrix::mirrored(half.matrix() * inner_pow.matrix() * half.matrix());
    Ok(Interpolant {
        matrix: SpdMatrix::new(out)?,
        stability_warnings: warnings,
    })
}

fn bures_wasserstein_geodesic(s_i: &SpdMatrix, s_j: &SpdMatrix, l: f64) -> Result<Interpolant> {
    let (cross, warnings) = bures_cross_sqrt_with_diagnostics(s_i, s_j)?;
    // (Sj Si)^1/2 is the transpose of (Si Sj)^1/2 because both factors are symmetric.
    let sym_cross = &cross + cross.transpose();
    let m = s_i.matrix() * (1.0 - l).powi(2) + s_j.matrix() * (l * l) + sym_cross * (l * (1.0 - l));
    Ok(Interpolant {
        matrix: SpdMatrix::new(SymmetricMatrix::mirrored(m))?,
        stability_warnings: warnings,
    })
}

/// `(Si Sj)^1/2 = Si^1/2 (Si^1/2 Sj Si^1/2)^1/2 Si^-1/2`. The result is not
/// symmetric in general.
pub fn bures_cross_sqrt(s_i: &SpdMatrix, s_j: &SpdMatrix) -> Result<DMatrix<f64>> {
    bures_cross_sqrt_with_diagnostics(s_i, s_j).map(|(m, _)| m)
}

pub fn bures_cross_sqrt_with_diagnostics(
    s_i: &SpdMatrix,
    s_j: &SpdMatrix,
) -> Result<(DMatrix<f64>, u32)> {
    s_i.ensure_same_dim(s_j)?;
    let eig_i = eig_sym(s_i)?;
    let mut warnings = warn_if_small(eig_i.min());
    let half = power_from_eigen(&eig_i, 0.5)?;
    let inv_half = power_from_eigen(&eig_i, -0.5)?;
    let inner = SymmetricMatrix::mirrored(half.matrix() * s_j.matrix() * half.matrix());
    let eig_inner = eig_sym(&inner)?;
    warnings += warn_if_small(eig_inner.min());
    let inner_sqrt = power_from_eigen(&eig_inner, 0.5)?;
    Ok((
        half.matrix() * inner_sqrt.matrix() * inv_half.matrix(),
        warnings,
    ))
}

/// `||log Si - log Sj||_F`.
pub fn log_euclidean_distance(s_i: &SpdMatrix, s_j: &SpdMatrix) -> Result<f64> {
    s_i.ensure_same_dim(s_j)?;
    let li = matrix_log(s_i)?;
    let lj = matrix_log(s_j)?;
    Ok((li.matrix() - lj.matrix()).norm())
}

/// Determinants (log-space) of both endpoints and of the interpolant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwellingReport {
    pub log_det_i: f64,
    pub log_det_j: f64,
    pub log_det_mix: f64,
    /// `det_mix > max(det_i, det_j)` beyond the relative slack.
    pub exceeds_max: bool,
    /// `min - eps <= det_mix <= max + eps` with `eps = 1e-9 * max`.
    pub within_bounds: bool,
}

impl SwellingReport {
    /// Builds the report from log-determinants, comparing in ratio form so
    /// nothing overflows for large dimensions.
    pub fn from_log_dets(log_det_i: f64, log_det_j: f64, log_det_mix: f64) -> Self {
        let hi = log_det_i.max(log_det_j);
        let lo = log_det_i.min(log_det_j);
        let ratio = (log_det_mix - hi).exp();
        let lo_ratio = (lo - hi).exp();
        let exceeds_max = ratio > 1.0 + SWELLING_TOLERANCE;
        let within_bounds = !exceeds_max && ratio >= lo_ratio - SWELLING_TOLERANCE;
        Self {
            log_det_i,
            log_det_j,
            log_det_mix,
            exceeds_max,
            within_bounds,
        }
    }

    /// `(1 - l) log det Si + l log det Sj`.
    pub fn log_geometric_interpolation(&self, lambda: MixRatio) -> f64 {
        let l = lambda.value();
        (1.0 - l) * self.log_det_i + l * self.log_det_j
    }
}

fn sum_log_eigenvalues(s: &SymmetricMatrix) -> Result<f64> {
    let eig = eig_sym(s)?;
    if eig.min() <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(eig.eigenvalues().iter().map(|m| m.ln()).sum())
}

pub fn swelling_check(
    s_i: &SpdMatrix,
    s_j: &SpdMatrix,
    lambda: MixRatio,
    metric: MetricKind,
) -> Result<SwellingReport> {
    let mix = geodesic(s_i, s_j, lambda, metric)?;
    Ok(SwellingReport::from_log_dets(
        sum_log_eigenvalues(s_i)?,
        sum_log_eigenvalues(s_j)?,
        sum_log_eigenvalues(&mix)?,
    ))
}

/// Smallest eigenvalue of `log((1-l) Si + l Sj) - ((1-l) log Si + l log Sj)`.
/// Operator concavity of the logarithm makes this nonnegative.
pub fn log_concavity_margin(s_i: &SpdMatrix, s_j: &SpdMatrix, lambda: MixRatio) -> Result<f64> {
    s_i.ensure_same_dim(s_j)?;
    let l = lambda.value();
    let line = SpdMatrix::new(SymmetricMatrix::lerp(s_i, s_j, l)?)?;
    let log_line = matrix_log(&line)?;
    let chord = SymmetricMatrix::lerp(&matrix_log(s_i)?, &matrix_log(s_j)?, l)?;
    let gap = SymmetricMatrix::mirrored(log_line.matrix() - chord.matrix());
    Ok(eig_sym(&gap)?.min())
}

/// Log-Euclidean interpolation on precomputed logarithms.
pub fn exp_of_log_mix(
    log_i: &SymmetricMatrix,
    log_j: &SymmetricMatrix,
    lambda: MixRatio,
) -> Result<SpdMatrix> {
    let tangent = SymmetricMatrix::lerp(log_i, log_j, lambda.value())?;
    exp_from_eigen(&eig_sym(&tangent)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate::gen_random_spd;
    use crate::linalg::{log_det, relative_frobenius_error};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(v: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diagonal(v).unwrap()
    }

    fn approx_diag(m: &SpdMatrix, expected: &[f64], tol: f64) {
        let n = expected.len();
        for (p, &d) in expected.iter().enumerate() {
            for q in 0..n {
                let e = if p == q { d } else { 0.0 };
                assert!(
                    (m.get(p, q) - e).abs() <= tol,
                    "({p},{q}) {} vs {e}",
                    m.get(p, q)
                );
            }
        }
    }

    #[test]
    fn ratio_validation() {
        assert!(MixRatio::new(-0.1).is_err());
        assert!(MixRatio::new(1.0 + 1e-12).is_err());
        assert!(MixRatio::new(f64::NAN).is_err());
        assert_eq!(MixRatio::new(0.25).unwrap().complement().value(), 0.75);
    }

    #[test]
    fn metric_names_roundtrip() {
        for m in MetricKind::ALL {
            assert_eq!(m.name().parse::<MetricKind>().unwrap(), m);
        }
        assert!("riemann".parse::<MetricKind>().is_err());
    }

    #[test]
    fn identical_endpoints_are_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = gen_random_spd(5, 50.0, &mut rng).unwrap();
        for m in MetricKind::ALL {
            for l in [0.0, 0.3, 1.0] {
                let g = geodesic(&s, &s, MixRatio::new(l).unwrap(), m).unwrap();
                assert!(relative_frobenius_error(g.matrix(), s.matrix()) < 1e-9, "{m}");
            }
        }
    }

    #[test]
    fn commuting_examples() {
        let a = diag(&[1.0, 4.0]);
        let b = diag(&[4.0, 1.0]);
        let half = MixRatio::new(0.5).unwrap();
        approx_diag(&geodesic(&a, &b, half, MetricKind::LogEuclidean).unwrap(), &[2.0, 2.0], 1e-12);
        approx_diag(&geodesic(&a, &b, half, MetricKind::Euclidean).unwrap(), &[2.5, 2.5], 1e-12);
    }

    #[test]
    fn commuting_diagonal_closed_forms() {
        // scalar oracles evaluated per eigenvalue
        let a = [0.5, 2.0, 7.0];
        let b = [3.0, 0.25, 7.0];
        let (sa, sb) = (diag(&a), diag(&b));
        for l in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let r = MixRatio::new(l).unwrap();
            let bw: Vec<f64> = a
                .iter()
                .zip(&b)
                .map(|(x, y)| ((1.0 - l) * x.sqrt() + l * y.sqrt()).powi(2))
                .collect();
            approx_diag(&geodesic(&sa, &sb, r, MetricKind::BuresWasserstein).unwrap(), &bw, 1e-12);
            let ch = bw.clone(); // diagonal Cholesky factors are the square roots
            approx_diag(&geodesic(&sa, &sb, r, MetricKind::Cholesky).unwrap(), &ch, 1e-12);
            let geo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.powf(1.0 - l) * y.powf(l)).collect();
            approx_diag(&geodesic(&sa, &sb, r, MetricKind::LogEuclidean).unwrap(), &geo, 1e-12);
            approx_diag(&geodesic(&sa, &sb, r, MetricKind::AffineInvariant).unwrap(), &geo, 1e-12);
        }
    }

    #[test]
    fn endpoints_and_symmetry_all_metrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let n = rng.gen_range(2..7);
            let si = gen_random_spd(n, 100.0, &mut rng).unwrap();
            let sj = gen_random_spd(n, 100.0, &mut rng).unwrap();
            let l = MixRatio::new(rng.gen()).unwrap();
            for m in MetricKind::ALL {
                let g0 = geodesic(&si, &sj, MixRatio::ZERO, m).unwrap();
                let g1 = geodesic(&si, &sj, MixRatio::ONE, m).unwrap();
                assert!(relative_frobenius_error(g0.matrix(), si.matrix()) <= 1e-8, "{m}");
                assert!(relative_frobenius_error(g1.matrix(), sj.matrix()) <= 1e-8, "{m}");
                let fwd = geodesic(&si, &sj, l, m).unwrap();
                let rev = geodesic(&sj, &si, l.complement(), m).unwrap();
                assert!(relative_frobenius_error(fwd.matrix(), rev.matrix()) <= 1e-8, "{m}");
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let a = SpdMatrix::identity(2);
        let b = SpdMatrix::identity(3);
        for m in MetricKind::ALL {
            assert!(matches!(
                geodesic(&a, &b, MixRatio::ZERO, m),
                Err(Error::DimensionMismatch { .. })
            ));
        }
        assert!(log_euclidean_distance(&a, &b).is_err());
    }

    #[test]
    fn bures_cross_sqrt_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = gen_random_spd(6, 30.0, &mut rng).unwrap();
        let i = SpdMatrix::identity(6);
        let c = bures_cross_sqrt(&i, &s).unwrap();
        let root = crate::linalg::matrix_power(&s, 0.5).unwrap();
        assert!(relative_frobenius_error(&c, root.matrix()) < 1e-10);
        let c = bures_cross_sqrt(&s, &s).unwrap();
        assert!(relative_frobenius_error(&c, s.matrix()) < 1e-10);

        let si = gen_random_spd(8, 100.0, &mut rng).unwrap();
        let sj = gen_random_spd(8, 100.0, &mut rng).unwrap();
        let c = bures_cross_sqrt(&si, &sj).unwrap();
        let prod = si.matrix() * sj.matrix();
        assert!(relative_frobenius_error(&(&c * &c), &prod) <= 1e-7);
    }

    #[test]
    fn stability_warning_on_tiny_spectrum() {
        let si = diag(&[1e-12, 1.0]);
        let sj = diag(&[1.0, 2.0]);
        let g = geodesic_with_diagnostics(&si, &sj, MixRatio::new(0.5).unwrap(), MetricKind::AffineInvariant)
            .unwrap();
        assert!(g.stability_warnings >= 1);
        let g = geodesic_with_diagnostics(&si, &sj, MixRatio::new(0.5).unwrap(), MetricKind::LogEuclidean)
            .unwrap();
        assert_eq!(g.stability_warnings, 0);
    }

    #[test]
    fn distance_examples() {
        let i = SpdMatrix::identity(2);
        let e = diag(&[std::f64::consts::E, std::f64::consts::E]);
        assert!((log_euclidean_distance(&i, &e).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(log_euclidean_distance(&e, &e).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = gen_random_spd(5, 20.0, &mut rng).unwrap();
        let b = gen_random_spd(5, 20.0, &mut rng).unwrap();
        let c = gen_random_spd(5, 20.0, &mut rng).unwrap();
        let dab = log_euclidean_distance(&a, &b).unwrap();
        assert!((dab - log_euclidean_distance(&b, &a).unwrap()).abs() < 1e-12);
        let dbc = log_euclidean_distance(&b, &c).unwrap();
        let dac = log_euclidean_distance(&a, &c).unwrap();
        assert!(dac <= dab + dbc + 1e-9);
        // direct formula: Frobenius norm of the log difference, summed by hand
        let (la, lb) = (matrix_log(&a).unwrap(), matrix_log(&b).unwrap());
        let mut acc = 0.0;
        for p in 0..5 {
            for q in 0..5 {
                acc += (la.get(p, q) - lb.get(p, q)).powi(2);
            }
        }
        assert!((dab - acc.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn swelling_reference_determinants() {
        let si = diag(&[5.40]);
        let sj = diag(&[6.46]);
        let half = MixRatio::new(0.5).unwrap();
        let r = swelling_check(&si, &sj, half, MetricKind::LogEuclidean).unwrap();
        assert!((r.log_det_mix.exp() - (5.40f64 * 6.46).sqrt()).abs() < 1e-12);
        assert!((r.log_det_mix.exp() - 5.906).abs() < 1e-3);
        assert!(r.within_bounds && !r.exceeds_max);
    }

    #[test]
    fn swelling_identical_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = gen_random_spd(4, 10.0, &mut rng).unwrap();
        for m in MetricKind::ALL {
            let r = swelling_check(&s, &s, MixRatio::new(0.4).unwrap(), m).unwrap();
            assert!((r.log_det_mix - r.log_det_i).abs() < 1e-9);
            assert!(r.within_bounds, "{m}");
        }
    }

    #[test]
    fn euclidean_swelling_exists() {
        // rotated copies of the same spectrum: equal determinants, and the
        // straight line through them inflates the determinant
        let si = diag(&[0.1, 10.0]);
        let sj = diag(&[10.0, 0.1]);
        let r = swelling_check(&si, &sj, MixRatio::new(0.5).unwrap(), MetricKind::Euclidean).unwrap();
        assert!(r.exceeds_max && !r.within_bounds);
        let le = swelling_check(&si, &sj, MixRatio::new(0.5).unwrap(), MetricKind::LogEuclidean).unwrap();
        assert!(le.within_bounds);
    }

    #[test]
    fn log_concavity_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let si = gen_random_spd(5, 100.0, &mut rng).unwrap();
            let sj = gen_random_spd(5, 100.0, &mut rng).unwrap();
            let l = MixRatio::new(rng.gen()).unwrap();
            assert!(log_concavity_margin(&si, &sj, l).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn metric_tag_attached_to_errors() {
        let si = diag(&[1e-300, 1.0]);
        let sj = diag(&[1e300, 1.0]);
        let err = geodesic(&si, &sj, MixRatio::new(0.5).unwrap(), MetricKind::AffineInvariant)
            .unwrap_err();
        assert!(matches!(err, Error::Metric { metric: MetricKind::AffineInvariant, .. }), "{err}");
    }

    #[test]
    fn log_det_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = gen_random_spd(6, 1e3, &mut rng).unwrap();
        let r = swelling_check(&s, &s, MixRatio::ZERO, MetricKind::LogEuclidean).unwrap();
        assert!((r.log_det_i - log_det(&s).unwrap()).abs() < 1e-12);
    }
}

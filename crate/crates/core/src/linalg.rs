//! Dense symmetric linear algebra.
//!
//! Every matrix function (log, exp, real powers) goes through exactly one
//! symmetric eigendecomposition `S = O diag(mu) O^T` and is evaluated on the
//! spectrum. No Padé or scaling-and-squaring is used anywhere, so `exp` and
//! `log` stay mutually consistent to working precision.
//!
//! Each thread keeps a count of eigendecompositions it has performed; see
//! [`eigendecomposition_count`]. The mixing code relies on it to show that
//! the cached path decomposes once per mix instead of three times.

use std::cell::Cell;
use std::ops::Deref;

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative Frobenius asymmetry accepted (and repaired) by [`SymmetricMatrix::new`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Largest exponent magnitude passed to `exp` before it is reported as overflow.
pub const EXP_LIMIT: f64 = 700.0;

/// Condition number above which an SPD matrix is flagged (never rejected).
pub const CONDITION_FLAG: f64 = 1e6;

thread_local! {
    static EIG_COUNT: Cell<u64> = const { Cell::new(0) };
}

/// Number of symmetric eigendecompositions performed on the calling thread.
pub fn eigendecomposition_count() -> u64 {
    EIG_COUNT.with(Cell::get)
}

/// Resets the calling thread's eigendecomposition counter to zero.
pub fn reset_eigendecomposition_count() {
    EIG_COUNT.with(|c| c.set(0));
}

/// A real symmetric matrix whose stored entries mirror exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    entries: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Validates `m` and mirrors it to `(m + m^T) / 2`.
    ///
    /// Inputs whose asymmetry `||m - m^T||_F` exceeds `1e-10 * ||m||_F` are
    /// rejected rather than repaired.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::Empty);
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let asymmetry = (&m - m.transpose()).norm();
        let tolerance = SYMMETRY_TOLERANCE * m.norm();
        if asymmetry > tolerance {
            return Err(Error::NotSymmetric {
                asymmetry,
                tolerance,
            });
        }
        Ok(Self::mirrored(m))
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: DMatrix::zeros(n, n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Averages mirrored entries without any tolerance check. Used on results
    /// that are symmetric in exact arithmetic but carry rounding drift.
    pub(crate) fn mirrored(mut m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        for q in 0..n {
            for p in 0..q {
                let v = 0.5 * (m[(p, q)] + m[(q, p)]);
                m[(p, q)] = v;
                m[(q, p)] = v;
            }
        }
        Self { entries: m }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn get(&self, p: usize, q: usize) -> f64 {
        self.entries[(p, q)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.entries.transpose().as_slice().to_vec()
    }

    pub fn ensure_same_dim(&self, other: &SymmetricMatrix) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        }
    }

    /// `(1 - t) * a + t * b`, entrywise, so symmetry is preserved exactly.
    pub fn lerp(a: &SymmetricMatrix, b: &SymmetricMatrix, t: f64) -> Result<SymmetricMatrix> {
        a.ensure_same_dim(b)?;
        let s = 1.0 - t;
        Ok(Self {
            entries: a.entries.zip_map(&b.entries, |x, y| s * x + t * y),
        })
    }
}

/// A symmetric matrix with strictly positive spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix {
    base: SymmetricMatrix,
    min_eigenvalue: f64,
    max_eigenvalue: f64,
}

impl SpdMatrix {
    /// Validates positive definiteness through an eigendecomposition.
    pub fn new(base: SymmetricMatrix) -> Result<Self> {
        let eig = eig_sym(&base)?;
        let min_eigenvalue = eig.min();
        if min_eigenvalue.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        Ok(Self {
            base,
            min_eigenvalue,
            max_eigenvalue: eig.max(),
        })
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        Self::new(SymmetricMatrix::new(m)?)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            base: SymmetricMatrix::identity(n),
            min_eigenvalue: 1.0,
            max_eigenvalue: 1.0,
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(SymmetricMatrix::from_diagonal(diag)?)
    }

    /// Caller guarantees the spectrum bounds, e.g. because the matrix was
    /// recomposed from a known positive spectrum.
    pub(crate) fn from_spectrum_unchecked(base: SymmetricMatrix, min: f64, max: f64) -> Self {
        Self {
            base,
            min_eigenvalue: min,
            max_eigenvalue: max,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.max_eigenvalue
    }

    pub fn condition_number(&self) -> f64 {
        self.max_eigenvalue / self.min_eigenvalue
    }

    /// False when the condition number exceeds [`CONDITION_FLAG`].
    pub fn is_well_conditioned(&self) -> bool {
        self.condition_number() <= CONDITION_FLAG
    }

    pub fn as_symmetric(&self) -> &SymmetricMatrix {
        &self.base
    }

    pub fn into_symmetric(self) -> SymmetricMatrix {
        self.base
    }
}

impl Deref for SpdMatrix {
    type Target = SymmetricMatrix;

    fn deref(&self) -> &SymmetricMatrix {
        &self.base
    }
}

impl AsRef<SymmetricMatrix> for SpdMatrix {
    fn as_ref(&self) -> &SymmetricMatrix {
        &self.base
    }
}

/// `S = O diag(mu) O^T` with eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    orthogonal: DMatrix<f64>,
    eigenvalues: DVector<f64>,
}

impl EigenDecomposition {
    pub fn orthogonal(&self) -> &DMatrix<f64> {
        &self.orthogonal
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `O diag(f(mu)) O^T`.
    pub fn recompose<F: Fn(f64) -> f64>(&self, f: F) -> SymmetricMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&m| f(m)).collect();
        recompose_spectrum(&self.orthogonal, &values)
    }

    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.recompose(|m| m)
    }
}

/// `O diag(values) O^T`, symmetrized.
pub(crate) fn recompose_spectrum(orthogonal: &DMatrix<f64>, values: &[f64]) -> SymmetricMatrix {
    let mut scaled = orthogonal.clone();
    for (k, &v) in values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(v);
    }
    SymmetricMatrix::mirrored(scaled * orthogonal.transpose())
}

/// Symmetric eigendecomposition, sorted ascending.
///
/// Backed by faer's divide-and-conquer solver: nalgebra's implicit QR
/// deflates too early on some well-conditioned inputs and loses ~1e-7 of
/// relative accuracy, which exp/log round trips cannot absorb.
pub fn eig_sym(s: &SymmetricMatrix) -> Result<EigenDecomposition> {
    EIG_COUNT.with(|c| c.set(c.get() + 1));
    let m = s.matrix();
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = s.dim();
    if is_diagonal(m) {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| m[(a, a)].total_cmp(&m[(b, b)]));
        return Ok(EigenDecomposition {
            orthogonal: DMatrix::from_fn(n, n, |r, c| if r == order[c] { 1.0 } else { 0.0 }),
            eigenvalues: DVector::from_iterator(n, order.iter().map(|&k| m[(k, k)])),
        });
    }
    let a = Mat::<f64>::from_fn(n, n, |r, c| m[(r, c)]);
    let eig = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::EigenNoConvergence {
        dim: n,
        frobenius: s.frobenius_norm(),
    })?;
    let (u, values) = (eig.U(), eig.S().column_vector());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| values[k]));
    let orthogonal = DMatrix::from_fn(n, n, |r, c| u[(r, order[c])]);
    Ok(EigenDecomposition {
        orthogonal,
        eigenvalues,
    })
}

// Exactly diagonal input keeps its spectrum bit for bit; the iterative
// solver may flush eigenvalues far below eps * ||S|| to zero.
fn is_diagonal(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|c| (0..n).all(|r| r == c || m[(r, c)] == 0.0))
}

fn ensure_positive(eig: &EigenDecomposition) -> Result<()> {
    let min_eigenvalue = eig.min();
    if min_eigenvalue > 0.0 {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite { min_eigenvalue })
    }
}

/// Matrix logarithm on a precomputed spectrum. Never clamps.
pub fn log_from_eigen(eig: &EigenDecomposition) -> Result<SymmetricMatrix> {
    ensure_positive(eig)?;
    Ok(eig.recompose(f64::ln))
}

/// Matrix exponential on a precomputed spectrum.
pub fn exp_from_eigen(eig: &EigenDecomposition) -> Result<SpdMatrix> {
    let magnitude = eig.min().abs().max(eig.max().abs());
    if magnitude > EXP_LIMIT {
        return Err(Error::Overflow { magnitude });
    }
    let base = eig.recompose(f64::exp);
    Ok(SpdMatrix::from_spectrum_unchecked(
        base,
        eig.min().exp(),
        eig.max().exp(),
    ))
}

pub fn matrix_log(s: &SpdMatrix) -> Result<SymmetricMatrix> {
    log_from_eigen(&eig_sym(s)?)
}

pub fn matrix_exp(h: &SymmetricMatrix) -> Result<SpdMatrix> {
    exp_from_eigen(&eig_sym(h)?)
}

/// `S^p` on a precomputed (positive) spectrum.
pub fn power_from_eigen(eig: &EigenDecomposition, p: f64) -> Result<SpdMatrix> {
    ensure_positive(eig)?;
    if p == 0.0 {
        return Ok(SpdMatrix::identity(eig.dim()));
    }
    for &m in eig.eigenvalues.iter() {
        let magnitude = (p * m.ln()).abs();
        if magnitude > EXP_LIMIT {
            return Err(Error::Overflow { magnitude });
        }
    }
    let (lo, hi) = (eig.min().powf(p), eig.max().powf(p));
    let base = eig.recompose(|m| m.powf(p));
    Ok(SpdMatrix::from_spectrum_unchecked(base, lo.min(hi), lo.max(hi)))
}

pub fn matrix_power(s: &SpdMatrix, p: f64) -> Result<SpdMatrix> {
    power_from_eigen(&eig_sym(s)?, p)
}

/// Lower-triangular `L` with `L L^T = S`.
#[derive(Clone, Debug)]
pub struct CholeskyFactor {
    lower: DMatrix<f64>,
}

impl CholeskyFactor {
    pub fn lower(&self) -> &DMatrix<f64> {
        &self.lower
    }

    pub fn into_lower(self) -> DMatrix<f64> {
        self.lower
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self.lower.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    pub fn reconstruct(&self) -> SymmetricMatrix {
        SymmetricMatrix::mirrored(&self.lower * self.lower.transpose())
    }

    /// Solves `S x = b` by forward and back substitution.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.lower.nrows();
        let mut z = b.clone();
        for i in 0..n {
            let mut acc = z[i];
            for k in 0..i {
                acc -= self.lower[(i, k)] * z[k];
            }
            z[i] = acc / self.lower[(i, i)];
        }
        for i in (0..n).rev() {
            let mut acc = z[i];
            for k in i + 1..n {
                acc -= self.lower[(k, i)] * z[k];
            }
            z[i] = acc / self.lower[(i, i)];
        }
        z
    }
}

/// Cholesky factorization of any symmetric matrix that is numerically
/// positive definite. Fails at the first non-positive pivot.
pub fn cholesky_symmetric(s: &SymmetricMatrix) -> Result<CholeskyFactor> {
    let n = s.dim();
    let a = s.matrix();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut pivot = a[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Error::CholeskyPivot {
                index: j,
                value: pivot,
            });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = acc / d;
        }
    }
    Ok(CholeskyFactor { lower: l })
}

pub fn cholesky(s: &SpdMatrix) -> Result<CholeskyFactor> {
    cholesky_symmetric(s)
}

/// Sum of log-eigenvalues.
pub fn log_det(s: &SpdMatrix) -> Result<f64> {
    let eig = eig_sym(s)?;
    ensure_positive(&eig)?;
    Ok(eig.eigenvalues.iter().map(|m| m.ln()).sum())
}

/// `exp(log_det(S))`; overflows to infinity for large dimensions.
pub fn det(s: &SpdMatrix) -> Result<f64> {
    Ok(log_det(s)?.exp())
}

/// `||a - b||_F / ||b||_F` (absolute when `b` is zero).
pub fn relative_frobenius_error(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let diff = (a - b).norm();
    let scale = b.norm();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

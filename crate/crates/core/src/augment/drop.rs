use rand::Rng;

use super::sampling::bernoulli;
use super::{check_keep_prob, MixedSample, Provenance, Strategy};
use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;

/// Symmetric binary matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMask {
    n: usize,
    bits: Vec<bool>,
}

impl EdgeMask {
    /// Calls `f(p, q)` once per `p <= q` in row-major order and mirrors.
    pub fn from_upper_fn<F: FnMut(usize, usize) -> bool>(n: usize, mut f: F) -> Self {
        let mut bits = vec![false; n * n];
        for p in 0..n {
            for q in p..n {
                let b = f(p, q);
                bits[p * n + q] = b;
                bits[q * n + p] = b;
            }
        }
        Self { n, bits }
    }

    pub fn filled(n: usize, value: bool) -> Self {
        Self {
            n,
            bits: vec![value; n * n],
        }
    }

    /// Off-diagonal entries from `f`, diagonal set to `true`.
    pub fn off_diagonal<F: FnMut(usize, usize) -> bool>(n: usize, mut f: F) -> Self {
        Self::from_upper_fn(n, |p, q| p == q || f(p, q))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: usize, q: usize) -> bool {
        self.bits[p * self.n + q]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|p| (0..p).all(|q| self.get(p, q) == self.get(q, p)))
    }

    /// Set entries and total count over the upper triangle, diagonal
    /// included when `with_diagonal`.
    pub fn upper_count(&self, with_diagonal: bool) -> (usize, usize) {
        let mut set = 0;
        let mut total = 0;
        for p in 0..self.n {
            let start = if with_diagonal { p } else { p + 1 };
            for q in start..self.n {
                total += 1;
                set += usize::from(self.get(p, q));
            }
        }
        (set, total)
    }
}

fn unchanged_label(strategy: Strategy, matrix: SymmetricMatrix, label: &[f64], mask: (usize, usize)) -> MixedSample {
    let mut provenance = Provenance::new(strategy);
    provenance.mask = Some(mask);
    MixedSample {
        matrix,
        label: label.to_vec(),
        provenance,
    }
}

/// Each node survives with probability `keep_prob`; dropped nodes lose their
/// whole row and column, diagonal included.
pub fn drop_node<R: Rng + ?Sized>(
    s: &SymmetricMatrix,
    label: &[f64],
    keep_prob: f64,
    rng: &mut R,
) -> Result<MixedSample> {
    check_keep_prob(keep_prob)?;
    let keep: Vec<bool> = (0..s.dim()).map(|_| bernoulli(keep_prob, rng)).collect();
    drop_node_with_mask(s, label, &keep)
}

pub fn drop_node_with_mask(s: &SymmetricMatrix, label: &[f64], keep: &[bool]) -> Result<MixedSample> {
    let n = s.dim();
    if keep.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: keep.len(),
        });
    }
    let mut m = s.matrix().clone();
    for p in 0..n {
        for q in 0..n {
            if !(keep[p] && keep[q]) {
                m[(p, q)] = 0.0;
            }
        }
    }
    let kept = keep.iter().filter(|&&k| k).count();
    Ok(unchanged_label(
        Strategy::DropNode,
        SymmetricMatrix::mirrored(m),
        label,
        (kept, n),
    ))
}

/// Each off-diagonal edge survives with probability `keep_prob`; the
/// diagonal is always kept.
pub fn drop_edge<R: Rng + ?Sized>(
    s: &SymmetricMatrix,
    label: &[f64],
    keep_prob: f64,
    rng: &mut R,
) -> Result<MixedSample> {
    check_keep_prob(keep_prob)?;
    let mask = EdgeMask::off_diagonal(s.dim(), |_, _| bernoulli(keep_prob, rng));
    drop_edge_with_mask(s, label, &mask)
}

/// `mask . S` entrywise.
pub fn drop_edge_with_mask(s: &SymmetricMatrix, label: &[f64], mask: &EdgeMask) -> Result<MixedSample> {
    let n = s.dim();
    if mask.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: mask.dim(),
        });
    }
    let m = nalgebra::DMatrix::from_fn(n, n, |p, q| if mask.get(p, q) { s.get(p, q) } else { 0.0 });
    Ok(unchanged_label(
        Strategy::DropEdge,
        SymmetricMatrix::mirrored(m),
        label,
        mask.upper_count(false),
    ))
}

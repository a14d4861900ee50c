//! Semi-orthogonal (Stiefel) matrices and the search for their best-conditioned
//! square row submatrices.
//!
//! For an `n×k` matrix `A` with `AᵀA = I`, every `k×k` row submatrix has
//! singular values in `[0, 1]`. The quantity of interest is the largest
//! smallest-singular-value over all `C(n, k)` row subsets, equivalently the
//! cosine of the smallest "largest principal angle" between `span(A)` and a
//! coordinate `k`-subspace.

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{householder_qr, singular_values_2x2, symmetric_eigenvalues, DenseMatrix};

/// Tolerance on `‖AᵀA − I‖_max` accepted by [`StiefelMatrix::new`].
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Default rank threshold for [`orthonormalize`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Largest number of row subsets [`best_submatrix`] will enumerate.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Subset values closer than this are treated as tied and resolved by the
/// lexicographically smallest row set.
pub const TIE_TOL: f64 = 1e-14;

/// An `n×k` real matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelMatrix(DenseMatrix);

impl StiefelMatrix {
    pub fn new(m: DenseMatrix) -> Result<Self> {
        if m.cols() > m.rows() {
            return Err(Error::Dimension(format!(
                "Stiefel matrix needs k <= n, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let residual = m.orthonormality_residual();
        if residual > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self(m))
    }

    /// The first `k` columns of the `n×n` identity.
    pub fn identity_embedding(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Dimension(format!(
                "need 1 <= k <= n, got n={n}, k={k}"
            )));
        }
        Ok(Self(DenseMatrix::identity_embedding(n, k)))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn k(&self) -> usize {
        self.0.cols()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    /// `A·Q` for a `k×k` orthogonal `Q`; spans the same subspace.
    pub fn rotate_basis(&self, q: &DenseMatrix) -> Result<Self> {
        let m = self.0.matmul(q)?;
        Self::new(m)
    }
}

/// Orthonormal basis of the column span of `m`.
///
/// Uses Householder QR; the triangular factor is normalized to a nonnegative
/// diagonal so the output is unique.
pub fn orthonormalize(m: &DenseMatrix, tol: f64) -> Result<StiefelMatrix> {
    if m.cols() > m.rows() {
        return Err(Error::Dimension(format!(
            "cannot orthonormalize {} columns in {} dimensions",
            m.cols(),
            m.rows()
        )));
    }
    let (q, r) = householder_qr(m)?;
    let smallest = sigma_min(&r)?;
    if smallest <= tol {
        return Err(Error::RankDeficient {
            sigma_min: smallest,
            tol,
        });
    }
    Ok(StiefelMatrix(q))
}

/// Haar-distributed point of the Stiefel manifold from a seeded generator.
pub fn haar_sample(n: usize, k: usize, seed: u64) -> Result<StiefelMatrix> {
    if k == 0 || k > n {
        return Err(Error::Dimension(format!(
            "need 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    loop {
        let data: Vec<f64> = (0..n * k)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let m = DenseMatrix::new(n, k, data)?;
        match orthonormalize(&m, DEFAULT_RANK_TOL) {
            Err(Error::RankDeficient { .. }) => continue,
            other => return other,
        }
    }
}

/// Smallest singular value of a square matrix.
///
/// 1×1 and 2×2 blocks use closed forms; larger blocks take the square root of
/// the smallest eigenvalue of the Gram matrix.
pub fn sigma_min(m: &DenseMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "sigma_min needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(match m.rows() {
        1 => m.get(0, 0).abs(),
        2 => singular_values_2x2([[m.get(0, 0), m.get(0, 1)], [m.get(1, 0), m.get(1, 1)]]).1,
        _ => symmetric_eigenvalues(&m.gram())[0].max(0.0).sqrt(),
    })
}

fn sigma_min_of_rows(a: &DenseMatrix, rows: &[usize]) -> f64 {
    if let [i, j] = rows {
        let (r0, r1) = (a.row(*i), a.row(*j));
        return singular_values_2x2([[r0[0], r0[1]], [r1[0], r1[1]]]).1;
    }
    if let [i] = rows {
        return a.get(*i, 0).abs();
    }
    sigma_min(&a.select_rows(rows)).expect("square by construction")
}

/// Smallest singular value of one row subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetValue {
    pub row_set: Vec<usize>,
    pub sigma_min: f64,
}

/// Outcome of the exhaustive submatrix search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmatrixReport {
    /// Sorted, 0-based.
    pub row_set: Vec<usize>,
    pub sigma_min: f64,
    pub determinant: f64,
    /// Every subset in lexicographic order.
    pub all_values: Vec<SubsetValue>,
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn check_cap(n: usize, k: usize, cap: u128) -> Result<()> {
    let count = binomial(n, k);
    if count > cap {
        return Err(Error::EnumerationCapExceeded { n, k, count, cap });
    }
    Ok(())
}

pub fn best_submatrix(a: &StiefelMatrix) -> Result<SubmatrixReport> {
    best_submatrix_with_cap(a, DEFAULT_ENUMERATION_CAP)
}

/// Exhaustive search over all `k`-row subsets for the largest `σ_min`.
///
/// Ties (within [`TIE_TOL`]) go to the lexicographically smallest row set.
pub fn best_submatrix_with_cap(a: &StiefelMatrix, cap: u128) -> Result<SubmatrixReport> {
    let (n, k) = (a.n(), a.k());
    check_cap(n, k, cap)?;
    let m = a.matrix();
    let all_values: Vec<SubsetValue> = (0..n)
        .combinations(k)
        .map(|rows| {
            let sigma_min = sigma_min_of_rows(m, &rows);
            SubsetValue {
                row_set: rows,
                sigma_min,
            }
        })
        .collect();
    let top = all_values
        .iter()
        .map(|v| v.sigma_min)
        .fold(f64::NEG_INFINITY, f64::max);
    let best = all_values
        .iter()
        .find(|v| v.sigma_min >= top - TIE_TOL)
        .expect("at least one subset");
    let determinant = m.select_rows(&best.row_set).determinant()?;
    Ok(SubmatrixReport {
        row_set: best.row_set.clone(),
        sigma_min: best.sigma_min,
        determinant,
        all_values,
    })
}

/// `max` over row subsets of `σ_min`, without building a report.
pub fn max_subset_sigma_min(a: &StiefelMatrix) -> Result<f64> {
    let (n, k) = (a.n(), a.k());
    check_cap(n, k, DEFAULT_ENUMERATION_CAP)?;
    Ok((0..n)
        .combinations(k)
        .map(|rows| sigma_min_of_rows(a.matrix(), &rows))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Largest principal angle between `span(A)` and the coordinate subspace
/// spanned by `row_set`, in radians.
pub fn principal_angle(a: &StiefelMatrix, row_set: &[usize]) -> Result<f64> {
    if row_set.len() != a.k() {
        return Err(Error::Index(format!(
            "row set has {} indices, expected {}",
            row_set.len(),
            a.k()
        )));
    }
    if let Some(&bad) = row_set.iter().find(|&&r| r >= a.n()) {
        return Err(Error::Index(format!(
            "row {bad} out of range for n = {}",
            a.n()
        )));
    }
    if !row_set.iter().all_unique() {
        return Err(Error::Index(format!("row set {row_set:?} has duplicates")));
    }
    let s = sigma_min_of_rows(a.matrix(), row_set);
    Ok(s.clamp(0.0, 1.0).acos())
}

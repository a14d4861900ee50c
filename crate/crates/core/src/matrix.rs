//! Small dense matrices and the handful of kernels the rest of the crate needs:
//! Householder QR, cyclic Jacobi for symmetric eigenvalues, a closed-form 2×2
//! SVD, and the plain-text matrix format.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Row-major dense real matrix with at least one row and one column and
/// finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * k);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != k {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {k}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(n, k, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    /// The first `k` columns of the `n×n` identity.
    pub fn identity_embedding(n: usize, k: usize) -> Self {
        let mut data = vec![0.0; n * k];
        for i in 0..k.min(n) {
            data[i * k + i] = 1.0;
        }
        Self {
            rows: n,
            cols: k,
            data,
        }
    }

    pub(crate) fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(l, j);
                }
            }
        }
        Ok(out)
    }

    /// `AᵀA`.
    pub fn gram(&self) -> Self {
        let k = self.cols;
        let mut g = Self::zeros(k, k);
        for a in 0..k {
            for b in a..k {
                let s: f64 = (0..self.rows)
                    .map(|i| self.get(i, a) * self.get(i, b))
                    .sum();
                g.set(a, b, s);
                g.set(b, a, s);
            }
        }
        g
    }

    /// Square submatrix made of the listed rows (all columns).
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `‖AᵀA − I‖_max`.
    pub fn orthonormality_residual(&self) -> f64 {
        let g = self.gram();
        let mut worst: f64 = 0.0;
        for a in 0..self.cols {
            for b in 0..self.cols {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g.get(a, b) - target).abs());
            }
        }
        worst
    }

    /// Determinant of a square matrix by partial-pivoting elimination.
    pub fn determinant(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        match n {
            1 => return Ok(self.data[0]),
            2 => return Ok(self.data[0] * self.data[3] - self.data[1] * self.data[2]),
            _ => {}
        }
        let mut a = self.data.clone();
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| a[x * n + c].abs().total_cmp(&a[y * n + c].abs()))
                .unwrap();
            if a[p * n + c] == 0.0 {
                return Ok(0.0);
            }
            if p != c {
                for j in 0..n {
                    a.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let pivot = a[c * n + c];
            det *= pivot;
            for r in c + 1..n {
                let f = a[r * n + c] / pivot;
                for j in c..n {
                    a[r * n + j] -= f * a[c * n + j];
                }
            }
        }
        Ok(det)
    }
}

/// Thin Householder QR of an `n×k` matrix with `n ≥ k`.
///
/// Returns `(Q, R)` with `Q` of size `n×k`, `R` upper triangular `k×k`, and
/// the diagonal of `R` nonnegative.
pub fn householder_qr(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (n, k) = (m.rows, m.cols);
    if k > n {
        return Err(Error::Dimension(format!(
            "QR needs rows >= cols, got {n}x{k}"
        )));
    }
    let mut a = m.data.clone();
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(k);
    for c in 0..k {
        let norm = (c..n).map(|i| a[i * k + c].powi(2)).sum::<f64>().sqrt();
        let mut v: Vec<f64> = (c..n).map(|i| a[i * k + c]).collect();
        if norm == 0.0 {
            vs.push(Vec::new());
            continue;
        }
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            vs.push(Vec::new());
            continue;
        }
        for j in c..k {
            let dot: f64 = (c..n).map(|i| v[i - c] * a[i * k + j]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in c..n {
                a[i * k + j] -= f * v[i - c];
            }
        }
        vs.push(v);
    }

    let mut r = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            r.set(i, j, a[i * k + j]);
        }
    }

    // Accumulate Q = H_0 H_1 ... H_{k-1} applied to the first k columns of I.
    let mut q = DenseMatrix::identity_embedding(n, k);
    for c in (0..k).rev() {
        let v = &vs[c];
        if v.is_empty() {
            continue;
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        for j in 0..k {
            let dot: f64 = (c..n).map(|i| v[i - c] * q.get(i, j)).sum();
            let f = 2.0 * dot / vnorm2;
            for i in c..n {
                let val = q.get(i, j) - f * v[i - c];
                q.set(i, j, val);
            }
        }
    }

    for i in 0..k {
        if r.get(i, i) < 0.0 {
            for j in i..k {
                r.set(i, j, -r.get(i, j));
            }
            for row in 0..n {
                q.set(row, i, -q.get(row, i));
            }
        }
    }
    Ok((q, r))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(s: &DenseMatrix) -> Vec<f64> {
    let n = s.rows;
    debug_assert!(s.is_square());
    let mut a = s.data.clone();
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum();
        // Off-diagonal mass at a few ulps of the Frobenius norm.
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = c * arp - sn * arq;
                    a[r * n + q] = sn * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[p * n + r];
                    let aqr = a[q * n + r];
                    a[p * n + r] = c * apr - sn * aqr;
                    a[q * n + r] = sn * apr + c * aqr;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Closed-form SVD of a 2×2 matrix `m = rot(phi) · diag(s1, s2) · rot(theta)`
/// where `rot(t) = [[cos t, −sin t], [sin t, cos t]]`, `s1 ≥ |s2|`, and `s2`
/// carries the sign of the determinant.
#[derive(Debug, Clone, Copy)]
pub struct Svd2 {
    pub phi: f64,
    pub theta: f64,
    pub s1: f64,
    pub s2: f64,
}

pub fn svd2(m: [[f64; 2]; 2]) -> Svd2 {
    let [[a, b], [c, d]] = m;
    let e = 0.5 * (a + d);
    let f = 0.5 * (a - d);
    let g = 0.5 * (c + b);
    let h = 0.5 * (c - b);
    let q = e.hypot(h);
    let r = f.hypot(g);
    let a1 = g.atan2(f);
    let a2 = h.atan2(e);
    Svd2 {
        phi: 0.5 * (a2 + a1),
        theta: 0.5 * (a2 - a1),
        s1: q + r,
        s2: q - r,
    }
}

pub(crate) fn rot2(t: f64) -> [[f64; 2]; 2] {
    let (s, c) = t.sin_cos();
    [[c, -s], [s, c]]
}

/// Singular values of a 2×2 block, `(largest, smallest)`.
///
/// The smallest is recovered as `|det| / largest`, which keeps small values
/// accurate where the difference formula would cancel.
pub fn singular_values_2x2(m: [[f64; 2]; 2]) -> (f64, f64) {
    let [[a, b], [c, d]] = m;
    let big = 0.5 * ((a + d).hypot(c - b) + (a - d).hypot(c + b));
    if big == 0.0 {
        return (0.0, 0.0);
    }
    let det = (a * d - b * c).abs();
    (big, (det / big).min(big))
}

/// Formats with 17 significant digits in scientific notation; parses back
/// to the identical `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Plain-text matrix format: a header line `n k`, then `n` lines of `k`
/// whitespace-separated numbers.
impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|&v| fmt17(v)).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for DenseMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad dimension token {t:?}")))
            })
            .collect::<Result<_>>()?;
        let [n, k] = dims[..] else {
            return Err(Error::Parse(format!(
                "header must be \"n k\", got {header:?}"
            )));
        };
        let mut data = Vec::with_capacity(n * k);
        let mut seen = 0;
        for (i, line) in lines.enumerate() {
            if i >= n {
                return Err(Error::Parse(format!("more than {n} data rows")));
            }
            let before = data.len();
            for t in line.split_whitespace() {
                data.push(
                    t.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number {t:?} on row {i}")))?,
                );
            }
            if data.len() - before != k {
                return Err(Error::Parse(format!(
                    "row {i} has {} entries, expected {k}",
                    data.len() - before
                )));
            }
            seen += 1;
        }
        if seen != n {
            return Err(Error::Parse(format!("expected {n} data rows, got {seen}")));
        }
        DenseMatrix::new(n, k, data)
    }
}

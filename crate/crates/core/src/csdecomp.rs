//! Thin CS decomposition of a 4×2 Stiefel matrix split into two 2×2 blocks:
//!
//! ```text
//! A = [Q1  0 ] [cos α    0  ]
//!     [0   Q2] [  0    cos β] Q3
//!              [sin α    0  ]
//!              [  0    sin β]
//! ```
//!
//! with `0 ≤ α ≤ β ≤ π/2`. The cosines are the singular values of the top
//! block, so `|p12| = cos α·cos β` and `|p34| = sin α·sin β`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{rot2, svd2};
use crate::stiefel::StiefelMatrix;

/// Sines below this are treated as zero when recovering `Q2`.
pub const VANISHING_SINE: f64 = 1e-8;

pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CSFactors {
    pub q1: Mat2,
    pub q2: Mat2,
    pub q3: Mat2,
    pub alpha: f64,
    pub beta: f64,
}

impl CSFactors {
    /// Rebuilds the 4×2 matrix from the factors, row-major.
    pub fn reconstruct(&self) -> [[f64; 2]; 4] {
        let (ca, sa) = (self.alpha.cos(), self.alpha.sin());
        let (cb, sb) = (self.beta.cos(), self.beta.sin());
        let top = mul(&self.q1, &mul(&diag(ca, cb), &self.q3));
        let bottom = mul(&self.q2, &mul(&diag(sa, sb), &self.q3));
        [top[0], top[1], bottom[0], bottom[1]]
    }
}

fn diag(a: f64, b: f64) -> Mat2 {
    [[a, 0.0], [0.0, b]]
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// `‖QᵀQ − I‖_max`.
pub fn orthogonality_residual(q: &Mat2) -> f64 {
    let g = mul(&transpose(q), q);
    (g[0][0] - 1.0)
        .abs()
        .max((g[1][1] - 1.0).abs())
        .max(g[0][1].abs())
        .max(g[1][0].abs())
}

pub fn cs_decompose(a: &StiefelMatrix) -> Result<CSFactors> {
    if (a.n(), a.k()) != (4, 2) {
        return Err(Error::Dimension(format!(
            "CS decomposition needs a 4x2 matrix, got {}x{}",
            a.n(),
            a.k()
        )));
    }
    let top = [[a.get(0, 0), a.get(0, 1)], [a.get(1, 0), a.get(1, 1)]];
    let bottom = [[a.get(2, 0), a.get(2, 1)], [a.get(3, 0), a.get(3, 1)]];

    let svd = svd2(top);
    let q1 = rot2(svd.phi);
    let mut q3 = rot2(svd.theta);
    // Flip the second row of Q3 so both cosines are nonnegative.
    if svd.s2 < 0.0 {
        q3[1] = [-q3[1][0], -q3[1][1]];
    }
    let c1 = svd.s1.min(1.0);
    let c2 = svd.s2.abs().min(c1);

    // bottom · Q3ᵀ = Q2 · diag(sin α, sin β)
    let w = mul(&bottom, &transpose(&q3));
    let col = |j: usize| [w[0][j], w[1][j]];
    let norm = |v: [f64; 2]| v[0].hypot(v[1]);
    let (w0, w1) = (col(0), col(1));
    let (n0, n1) = (norm(w0), norm(w1));

    let dot = |u: [f64; 2], v: [f64; 2]| u[0] * v[0] + u[1] * v[1];
    // Orthogonal completion of a unit column, pointing along `w` when `w`
    // is significant and otherwise giving det(Q2) = +1.
    let complete = |u: [f64; 2], w: [f64; 2], significant: bool, u_is_first: bool| {
        let c = if u_is_first {
            [-u[1], u[0]]
        } else {
            [u[1], -u[0]]
        };
        if significant && dot(c, w) < 0.0 {
            [-c[0], -c[1]]
        } else {
            c
        }
    };
    let (sig0, sig1) = (n0 > VANISHING_SINE, n1 > VANISHING_SINE);
    let (u0, u1) = if !sig0 && !sig1 {
        ([1.0, 0.0], [0.0, 1.0])
    } else if n1 >= n0 {
        let u1 = [w1[0] / n1, w1[1] / n1];
        (complete(u1, w0, sig0, false), u1)
    } else {
        let u0 = [w0[0] / n0, w0[1] / n0];
        (u0, complete(u0, w1, sig1, true))
    };
    let q2 = [[u0[0], u1[0]], [u0[1], u1[1]]];
    let s1 = dot(u0, w0).max(0.0);
    let s2 = dot(u1, w1).max(0.0);

    let alpha = s1.atan2(c1);
    let beta = s2.atan2(c2).max(alpha);
    Ok(CSFactors {
        q1,
        q2,
        q3,
        alpha,
        beta,
    })
}

/// `(cos α·cos β, sin α·sin β)`, the magnitudes of the two block determinants.
pub fn minors_from_cs(f: &CSFactors) -> (f64, f64) {
    (f.alpha.cos() * f.beta.cos(), f.alpha.sin() * f.beta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::extremal_matrix;
    use crate::pluecker::pluecker4x2;
    use crate::stiefel::{haar_sample, sigma_min};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    fn reconstruction_error(a: &StiefelMatrix, f: &CSFactors) -> f64 {
        let r = f.reconstruct();
        (0..4)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (r[i][j] - a.get(i, j)).abs())
            .fold(0.0, f64::max)
    }

    fn check_contract(a: &StiefelMatrix) -> CSFactors {
        let f = cs_decompose(a).unwrap();
        assert!(reconstruction_error(a, &f) < 1e-10, "{f:?}");
        for q in [&f.q1, &f.q2, &f.q3] {
            assert!(orthogonality_residual(q) <= 1e-12);
        }
        assert!(0.0 <= f.alpha && f.alpha <= f.beta && f.beta <= FRAC_PI_2);
        f
    }

    #[test]
    fn identity_embedding() {
        let a = StiefelMatrix::identity_embedding(4, 2).unwrap();
        let f = check_contract(&a);
        assert_eq!((f.alpha, f.beta), (0.0, 0.0));
        assert_eq!(f.q1, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(f.q3, [[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn extremal_angles() {
        let f = check_contract(&extremal_matrix());
        assert!(f.alpha.abs() < 1e-15);
        assert!((f.beta - FRAC_PI_3).abs() < 1e-15);
    }

    #[test]
    fn haar_samples_satisfy_contract() {
        for seed in 0..500 {
            let a = haar_sample(4, 2, seed).unwrap();
            let f = check_contract(&a);
            let p = pluecker4x2(&a).unwrap();
            let (top, bottom) = minors_from_cs(&f);
            assert!((p.p12.abs() - top).abs() < 1e-12);
            assert!((p.p34.abs() - bottom).abs() < 1e-12);
            let top_block = a.matrix().select_rows(&[0, 1]);
            let bottom_block = a.matrix().select_rows(&[2, 3]);
            assert!((sigma_min(&top_block).unwrap() - f.beta.cos()).abs() < 1e-10);
            assert!((sigma_min(&bottom_block).unwrap() - f.alpha.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_sines() {
        // Bottom block of rank one: sin α = 0 but sin β > 0.
        let c = 0.6f64;
        let s = 0.8f64;
        let a = StiefelMatrix::new(
            crate::matrix::DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, c], [0.0, 0.0], [0.0, s]])
                .unwrap(),
        )
        .unwrap();
        let f = check_contract(&a);
        assert_eq!(f.alpha, 0.0);
        assert!((f.beta - s.atan2(c)).abs() < 1e-15);
        let det = f.q2[0][0] * f.q2[1][1] - f.q2[0][1] * f.q2[1][0];
        assert!(det > 0.0);

        // Tiny but nonzero sine still yields an orthogonal Q2.
        let eps = 1e-9f64;
        let a = StiefelMatrix::new(
            crate::matrix::DenseMatrix::from_rows(&[
                [(1.0 - eps * eps).sqrt(), 0.0],
                [0.0, c],
                [eps, 0.0],
                [0.0, s],
            ])
            .unwrap(),
        )
        .unwrap();
        check_contract(&a);
    }

    #[test]
    fn minors_examples() {
        let f = |alpha, beta| CSFactors {
            q1: [[1.0, 0.0], [0.0, 1.0]],
            q2: [[1.0, 0.0], [0.0, 1.0]],
            q3: [[1.0, 0.0], [0.0, 1.0]],
            alpha,
            beta,
        };
        let (t, b) = minors_from_cs(&f(0.0, FRAC_PI_3));
        assert!((t - 0.5).abs() < 1e-15 && b == 0.0);
        let (t, b) = minors_from_cs(&f(FRAC_PI_6, FRAC_PI_3));
        let q = 3f64.sqrt() / 4.0;
        assert!((t - q).abs() < 1e-15 && (b - q).abs() < 1e-15);
        assert_eq!(minors_from_cs(&f(0.0, 0.0)), (1.0, 0.0));
    }

    #[test]
    fn rejects_other_shapes() {
        let a = StiefelMatrix::identity_embedding(3, 2).unwrap();
        assert!(matches!(cs_decompose(&a), Err(Error::Dimension(_))));
    }
}

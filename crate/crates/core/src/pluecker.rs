//! Plücker coordinates of 2-planes in ℝ⁴ and the coordinate changes used to
//! analyse them.
//!
//! A 4×2 Stiefel matrix has six signed 2×2 row minors `p_ij`. They satisfy the
//! quadratic relation `p12·p34 − p13·p24 + p14·p23 = 0` and, because the
//! columns are orthonormal, `Σ p_ij² = 1`. Pairing opposite minors as
//!
//! ```text
//! x1 = p12 + p34   x2 = p12 − p34
//! y1 = p13 − p24   y2 = p13 + p24
//! z1 = p14 + p23   z2 = p14 − p23
//! ```
//!
//! turns the two identities into two unit spheres, and the per-pair ellipse
//! bounds on `(p12, p34)` etc. into bounds on `a² ± ab + b²`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stiefel::StiefelMatrix;

/// Bound on the quadratic forms `a² ± ab + b²` implied by the per-pair ellipse
/// inequalities.
pub const DEFAULT_FORM_BOUND: f64 = 0.75;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlueckerCoords {
    pub p12: f64,
    pub p13: f64,
    pub p14: f64,
    pub p23: f64,
    pub p24: f64,
    pub p34: f64,
}

impl PlueckerCoords {
    pub fn to_array(self) -> [f64; 6] {
        [self.p12, self.p13, self.p14, self.p23, self.p24, self.p34]
    }

    pub fn from_array(p: [f64; 6]) -> Self {
        let [p12, p13, p14, p23, p24, p34] = p;
        Self {
            p12,
            p13,
            p14,
            p23,
            p24,
            p34,
        }
    }

    /// Minor for rows `(i, j)`, 0-based, with `det(rows j,i) = −det(rows i,j)`.
    pub fn minor(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let v = match (lo, hi) {
            (0, 1) => self.p12,
            (0, 2) => self.p13,
            (0, 3) => self.p14,
            (1, 2) => self.p23,
            (1, 3) => self.p24,
            (2, 3) => self.p34,
            _ => panic!("row index out of range"),
        };
        sign * v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformedVars {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
    pub z1: f64,
    pub z2: f64,
}

impl TransformedVars {
    pub fn pairs(&self) -> [(f64, f64); 3] {
        [(self.x1, self.x2), (self.y1, self.y2), (self.z1, self.z2)]
    }

    fn from_pairs([(x1, x2), (y1, y2), (z1, z2)]: [(f64, f64); 3]) -> Self {
        Self {
            x1,
            x2,
            y1,
            y2,
            z1,
            z2,
        }
    }

    /// Representative in the nonnegative orthant.
    ///
    /// Both sphere equations and the pair `{a² + ab + b², a² − ab + b²}` are
    /// unchanged when any single unknown changes sign, so taking absolute
    /// values maps a solution to a solution.
    pub fn nonnegative_representative(&self) -> Self {
        let p = self.pairs();
        Self::from_pairs(p.map(|(a, b)| (a.abs(), b.abs())))
    }
}

/// Sector radii `X, Y, Z` and angles `x, y, z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticParams {
    #[serde(rename = "X")]
    pub big_x: f64,
    #[serde(rename = "Y")]
    pub big_y: f64,
    #[serde(rename = "Z")]
    pub big_z: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EllipticParams {
    pub fn to_transformed(&self) -> TransformedVars {
        let s = |r: f64, t: f64| sector_point(r, t);
        TransformedVars::from_pairs([
            s(self.big_x, self.x),
            s(self.big_y, self.y),
            s(self.big_z, self.z),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemReport {
    pub sphere1_residual: f64,
    pub sphere2_residual: f64,
    /// `x1²+x1x2+x2², x1²−x1x2+x2²`, then the `y` and `z` analogues.
    pub qform_values: [f64; 6],
    pub bound_used: f64,
    pub satisfied: bool,
}

pub fn pluecker4x2(a: &StiefelMatrix) -> Result<PlueckerCoords> {
    if (a.n(), a.k()) != (4, 2) {
        return Err(Error::Dimension(format!(
            "Plücker coordinates need a 4x2 matrix, got {}x{}",
            a.n(),
            a.k()
        )));
    }
    let m = |i: usize, j: usize| a.get(i, 0) * a.get(j, 1) - a.get(i, 1) * a.get(j, 0);
    Ok(PlueckerCoords {
        p12: m(0, 1),
        p13: m(0, 2),
        p14: m(0, 3),
        p23: m(1, 2),
        p24: m(1, 3),
        p34: m(2, 3),
    })
}

/// `(|p12·p34 − p13·p24 + p14·p23|, |Σp² − 1|)`.
pub fn invariant_residuals(p: &PlueckerCoords) -> (f64, f64) {
    let relation = p.p12 * p.p34 - p.p13 * p.p24 + p.p14 * p.p23;
    let norm: f64 = p.to_array().iter().map(|v| v * v).sum();
    (relation.abs(), (norm - 1.0).abs())
}

pub fn to_transformed(p: &PlueckerCoords) -> TransformedVars {
    TransformedVars {
        x1: p.p12 + p.p34,
        x2: p.p12 - p.p34,
        y1: p.p13 - p.p24,
        y2: p.p13 + p.p24,
        z1: p.p14 + p.p23,
        z2: p.p14 - p.p23,
    }
}

pub fn from_transformed(v: &TransformedVars) -> PlueckerCoords {
    PlueckerCoords {
        p12: 0.5 * (v.x1 + v.x2),
        p34: 0.5 * (v.x1 - v.x2),
        p13: 0.5 * (v.y1 + v.y2),
        p24: 0.5 * (v.y2 - v.y1),
        p14: 0.5 * (v.z1 + v.z2),
        p23: 0.5 * (v.z1 - v.z2),
    }
}

/// Evaluates the two sphere equations and the six quadratic-form bounds.
pub fn eval_system(v: &TransformedVars, bound: f64, tol: f64) -> SystemReport {
    let sphere1 = v.x1 * v.x1 + v.y1 * v.y1 + v.z1 * v.z1;
    let sphere2 = v.x2 * v.x2 + v.y2 * v.y2 + v.z2 * v.z2;
    let mut qform_values = [0.0; 6];
    for (slot, (a, b)) in v.pairs().into_iter().enumerate() {
        let (plus, minus) = quadratic_forms(a, b);
        qform_values[2 * slot] = plus;
        qform_values[2 * slot + 1] = minus;
    }
    let sphere1_residual = (sphere1 - 1.0).abs();
    let sphere2_residual = (sphere2 - 1.0).abs();
    let satisfied = sphere1_residual <= tol
        && sphere2_residual <= tol
        && qform_values.iter().all(|&q| q <= bound + tol);
    SystemReport {
        sphere1_residual,
        sphere2_residual,
        qform_values,
        bound_used: bound,
        satisfied,
    }
}

/// `(a² + ab + b², a² − ab + b²)`.
pub fn quadratic_forms(a: f64, b: f64) -> (f64, f64) {
    let sq = a * a + b * b;
    (sq + a * b, sq - a * b)
}

/// `(R·sin(θ + π/3), R·sin(θ − π/3))`.
pub fn sector_point(radius: f64, angle: f64) -> (f64, f64) {
    (
        radius * (angle + FRAC_PI_3).sin(),
        radius * (angle - FRAC_PI_3).sin(),
    )
}

/// Inverts [`sector_point`] for a nonnegative pair.
///
/// `a + b = R·sin θ` and `a − b = √3·R·cos θ`, so the radius is
/// `√((a+b)² + (a−b)²/3)` and the angle lies in `[π/3, 2π/3]`. A zero pair
/// maps to angle `π/2`.
pub fn sector_params(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let c = (a - b) / SQRT_3;
    let radius = s.hypot(c);
    if radius == 0.0 {
        return (0.0, FRAC_PI_2);
    }
    (radius, s.atan2(c).clamp(FRAC_PI_3, 2.0 * FRAC_PI_3))
}

pub fn elliptic_params(v: &TransformedVars) -> Result<EllipticParams> {
    let named = [
        ("x1", v.x1),
        ("x2", v.x2),
        ("y1", v.y1),
        ("y2", v.y2),
        ("z1", v.z1),
        ("z2", v.z2),
    ];
    if let Some(&(name, value)) = named.iter().find(|(_, val)| *val < 0.0 || val.is_nan()) {
        return Err(Error::NegativeComponent { name, value });
    }
    let (big_x, x) = sector_params(v.x1, v.x2);
    let (big_y, y) = sector_params(v.y1, v.y2);
    let (big_z, z) = sector_params(v.z1, v.z2);
    Ok(EllipticParams {
        big_x,
        big_y,
        big_z,
        x,
        y,
        z,
    })
}

/// `(Σ sin²(t + π/3), Σ sin²(t − π/3))` over `t ∈ {x, y, z}`.
pub fn eq3_sums(x: f64, y: f64, z: f64) -> (f64, f64) {
    let sq = |t: f64| t.sin().powi(2);
    let plus = sq(x + FRAC_PI_3) + sq(y + FRAC_PI_3) + sq(z + FRAC_PI_3);
    let minus = sq(x - FRAC_PI_3) + sq(y - FRAC_PI_3) + sq(z - FRAC_PI_3);
    (plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::extremal_matrix;
    use crate::stiefel::haar_sample;

    const R3: f64 = SQRT_3;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn extremal_coords() -> PlueckerCoords {
        PlueckerCoords::from_array([0.5, R3 / 4.0, R3 / 4.0, -R3 / 4.0, -R3 / 4.0, 0.0])
    }

    fn assert_coords(got: PlueckerCoords, want: PlueckerCoords, tol: f64) {
        for (g, w) in got.to_array().iter().zip(want.to_array()) {
            assert!(close(*g, w, tol), "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn minors_of_identity_embedding() {
        let a = StiefelMatrix::identity_embedding(4, 2).unwrap();
        let p = pluecker4x2(&a).unwrap();
        assert_eq!(p.to_array(), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.minor(1, 0), -1.0);
    }

    #[test]
    fn minors_of_extremal_matrix() {
        let p = pluecker4x2(&extremal_matrix()).unwrap();
        assert_coords(p, extremal_coords(), 1e-15);
        let (rel, norm) = invariant_residuals(&p);
        assert!(rel < 1e-15 && norm < 1e-15);
    }

    #[test]
    fn minors_reject_other_shapes() {
        let a = StiefelMatrix::identity_embedding(5, 2).unwrap();
        assert!(matches!(pluecker4x2(&a), Err(Error::Dimension(_))));
    }

    #[test]
    fn residual_examples() {
        assert_eq!(
            invariant_residuals(&PlueckerCoords::from_array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])),
            (0.0, 0.0)
        );
        assert_eq!(
            invariant_residuals(&PlueckerCoords::from_array([1.0, 1.0, 0.0, 0.0, 0.0, 0.0])),
            (0.0, 1.0)
        );
        let (rel, norm) = invariant_residuals(&extremal_coords());
        assert!(rel < 1e-16 && norm < 1e-15);
    }

    #[test]
    fn haar_samples_satisfy_both_identities() {
        for seed in 0..200 {
            let p = pluecker4x2(&haar_sample(4, 2, seed).unwrap()).unwrap();
            let (rel, norm) = invariant_residuals(&p);
            assert!(rel < 1e-12 && norm < 1e-12);
            let r = eval_system(&to_transformed(&p), DEFAULT_FORM_BOUND, 0.0);
            assert!(r.sphere1_residual < 1e-12 && r.sphere2_residual < 1e-12);
        }
    }

    #[test]
    fn transformed_examples() {
        let v = to_transformed(&extremal_coords());
        let want = [0.5, 0.5, R3 / 2.0, 0.0, 0.0, R3 / 2.0];
        let got = [v.x1, v.x2, v.y1, v.y2, v.z1, v.z2];
        for (g, w) in got.iter().zip(want) {
            assert!(close(*g, w, 1e-15));
        }
        let e = to_transformed(&PlueckerCoords::from_array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        assert_eq!(
            [e.x1, e.x2, e.y1, e.y2, e.z1, e.z2],
            [1.0, 1.0, 0.0, 0.0, 0.0, 0.0]
        );
        let r = eval_system(&e, DEFAULT_FORM_BOUND, 1e-12);
        assert_eq!((r.sphere1_residual, r.sphere2_residual), (0.0, 0.0));
    }

    #[test]
    fn inverse_examples() {
        let p = from_transformed(&TransformedVars {
            x1: 1.0,
            x2: 1.0,
            y1: 0.0,
            y2: 0.0,
            z1: 0.0,
            z2: 0.0,
        });
        assert_eq!(p.to_array(), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let p = from_transformed(&TransformedVars {
            x1: 0.5,
            x2: 0.5,
            y1: R3 / 2.0,
            y2: 0.0,
            z1: 0.0,
            z2: R3 / 2.0,
        });
        assert_coords(p, extremal_coords(), 1e-16);
    }

    #[test]
    fn system_at_extremal_point() {
        let v = to_transformed(&pluecker4x2(&extremal_matrix()).unwrap());
        let r = eval_system(&v, DEFAULT_FORM_BOUND, 1e-12);
        let want = [0.75, 0.25, 0.75, 0.75, 0.75, 0.75];
        for (g, w) in r.qform_values.iter().zip(want) {
            assert!(close(*g, w, 1e-15), "{:?}", r.qform_values);
        }
        assert!(r.satisfied);
        let at_bound = r
            .qform_values
            .iter()
            .filter(|q| close(**q, 0.75, 1e-15))
            .count();
        assert_eq!(at_bound, 5);
    }

    #[test]
    fn system_failures() {
        let v = TransformedVars {
            x1: 1.0,
            x2: 1.0,
            y1: 0.0,
            y2: 0.0,
            z1: 0.0,
            z2: 0.0,
        };
        let r = eval_system(&v, DEFAULT_FORM_BOUND, 1e-12);
        assert_eq!(r.qform_values[0], 3.0);
        assert!(!r.satisfied);

        let zero = TransformedVars {
            x1: 0.0,
            x2: 0.0,
            y1: 0.0,
            y2: 0.0,
            z1: 0.0,
            z2: 0.0,
        };
        let r = eval_system(&zero, DEFAULT_FORM_BOUND, 1e-12);
        assert_eq!((r.sphere1_residual, r.sphere2_residual), (1.0, 1.0));
        assert!(!r.satisfied);
    }

    #[test]
    fn elliptic_params_at_extremal_point() {
        let v = to_transformed(&extremal_coords());
        let e = elliptic_params(&v).unwrap();
        for r in [e.big_x, e.big_y, e.big_z] {
            assert!(close(r, 1.0, 1e-15));
        }
        assert!(close(e.x, FRAC_PI_2, 1e-15));
        assert!(close(e.y, FRAC_PI_3, 1e-15));
        assert!(close(e.z, 2.0 * FRAC_PI_3, 1e-15));
    }

    #[test]
    fn sector_examples() {
        let (r, t) = sector_params(R3 / 2.0, 0.0);
        assert!(close(r, 1.0, 1e-15) && close(t, FRAC_PI_3, 1e-15));
        assert_eq!(sector_params(0.0, 0.0), (0.0, FRAC_PI_2));
    }

    #[test]
    fn elliptic_params_rejects_negative() {
        let v = TransformedVars {
            x1: 0.1,
            x2: 0.2,
            y1: -0.3,
            y2: 0.0,
            z1: 0.0,
            z2: 0.0,
        };
        assert_eq!(
            elliptic_params(&v),
            Err(Error::NegativeComponent {
                name: "y1",
                value: -0.3
            })
        );
        let fixed = v.nonnegative_representative();
        assert!(elliptic_params(&fixed).is_ok());
        let r1 = eval_system(&v, DEFAULT_FORM_BOUND, 0.0);
        let r2 = eval_system(&fixed, DEFAULT_FORM_BOUND, 0.0);
        assert_eq!(r1.sphere1_residual, r2.sphere1_residual);
    }

    #[test]
    fn angle_sum_examples() {
        let (p, m) = eq3_sums(FRAC_PI_2, FRAC_PI_3, 2.0 * FRAC_PI_3);
        assert!(close(p, 1.0, 1e-15) && close(m, 1.0, 1e-15));
        let (p, m) = eq3_sums(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2);
        assert!(close(p, 0.75, 1e-15) && close(m, 0.75, 1e-15));
        let (p, m) = eq3_sums(FRAC_PI_3, FRAC_PI_3, FRAC_PI_3);
        assert!(close(p, 2.25, 1e-15) && close(m, 0.0, 1e-15));
    }
}

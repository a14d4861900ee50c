//! Boundary surfaces of the two angle-sum constraints, as CSV.
//!
//! Over `[π/3, 2π/3]³` the surfaces are `Σ sin²(t + π/3) = 1` ("plus") and
//! `Σ sin²(t − π/3) = 1` ("minus"). For every `(x, y)` on a square grid we
//! solve for `z`, and mark grid points where both surfaces meet.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
use std::fmt::Write;

use submatrix_core::matrix::fmt17;

pub const BISECTION_TOL: f64 = 1e-12;
pub const CONTACT_TOL: f64 = 1e-6;
/// Endpoint residual accepted as a root; covers roots that sit exactly on
/// the interval boundary and miss a sign change by rounding.
const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Surface {
    Plus,
    Minus,
    Contact,
}

impl Surface {
    pub fn label(self) -> &'static str {
        match self {
            Surface::Plus => "plus",
            Surface::Minus => "minus",
            Surface::Contact => "contact",
        }
    }

    fn shift(self) -> f64 {
        match self {
            Surface::Plus => FRAC_PI_3,
            _ => -FRAC_PI_3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureRow {
    pub surface: Surface,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

fn sq_sin(t: f64) -> f64 {
    t.sin().powi(2)
}

/// All `z ∈ [lo, hi]` with `sin²(z + shift) = target`.
///
/// The interval is split where the derivative `sin(2(z + shift))` vanishes,
/// and each monotone piece is bisected.
fn solve_z(target: f64, shift: f64, lo: f64, hi: f64) -> Vec<f64> {
    let g = |z: f64| sq_sin(z + shift) - target;
    let mut cuts = vec![lo];
    let first = ((lo + shift) / FRAC_PI_2).floor() as i64;
    for m in first..=first + 8 {
        let c = m as f64 * FRAC_PI_2 - shift;
        if c > lo && c < hi {
            cuts.push(c);
        }
    }
    cuts.push(hi);

    let mut roots: Vec<f64> = Vec::new();
    let push = |z: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|&r| (z - r).abs() > BISECTION_TOL) {
            roots.push(z);
        }
    };
    for w in cuts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (ga, gb) = (g(a), g(b));
        if ga.abs() <= ENDPOINT_TOL {
            push(a, &mut roots);
            continue;
        }
        if gb.abs() <= ENDPOINT_TOL {
            push(b, &mut roots);
            continue;
        }
        if ga.signum() == gb.signum() {
            continue;
        }
        let a_negative = ga < 0.0;
        while b - a > BISECTION_TOL {
            let mid = 0.5 * (a + b);
            if (g(mid) < 0.0) == a_negative {
                a = mid;
            } else {
                b = mid;
            }
        }
        push(0.5 * (a + b), &mut roots);
    }
    roots
}

fn grid(resolution: usize) -> Vec<f64> {
    let lo = FRAC_PI_3;
    let hi = 2.0 * FRAC_PI_3;
    let n = resolution.max(2);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Surface points for a `resolution × resolution` grid of `(x, y)`.
///
/// Rows come out as all `plus` points, then all `minus` points, then the
/// `contact` points, each group in grid order.
pub fn figure_eq3_data(resolution: usize) -> Vec<FigureRow> {
    let axis = grid(resolution);
    let (lo, hi) = (axis[0], axis[axis.len() - 1]);
    let mut rows = Vec::new();
    let mut per_point: Vec<(f64, f64, Vec<f64>, Vec<f64>)> = Vec::new();
    for &x in &axis {
        for &y in &axis {
            let solve = |s: Surface| {
                let target = 1.0 - sq_sin(x + s.shift()) - sq_sin(y + s.shift());
                solve_z(target, s.shift(), lo, hi)
            };
            per_point.push((x, y, solve(Surface::Plus), solve(Surface::Minus)));
        }
    }
    for (surface, pick) in [(Surface::Plus, 0), (Surface::Minus, 1)] {
        for (x, y, plus, minus) in &per_point {
            let zs = if pick == 0 { plus } else { minus };
            rows.extend(zs.iter().map(|&z| FigureRow {
                surface,
                x: *x,
                y: *y,
                z,
            }));
        }
    }
    for (x, y, plus, minus) in &per_point {
        for &zp in plus {
            if minus.iter().any(|&zm| (zp - zm).abs() <= CONTACT_TOL) {
                rows.push(FigureRow {
                    surface: Surface::Contact,
                    x: *x,
                    y: *y,
                    z: zp,
                });
            }
        }
    }
    rows
}

pub fn to_csv(rows: &[FigureRow]) -> String {
    let mut out = String::from("surface,x,y,z\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.surface.label(),
            fmt17(r.x),
            fmt17(r.y),
            fmt17(r.z)
        )
        .expect("writing to a String");
    }
    out
}

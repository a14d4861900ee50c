//! Numerical certificate for the `n = 4, k = 2` case.
//!
//! Each check evaluates one step of the argument on a dense deterministic
//! grid and reports the worst value it saw together with the point where it
//! occurred. Checks are split into named sub-checks, each with its own
//! tolerance; a check passes when all of its sub-checks do. Any witness can
//! be fed back through [`reevaluate`] to reproduce the reported violation.
//!
//! This is numerical evidence, not a formal proof: the grid checks are made
//! sound only where an explicit Lipschitz margin is stated.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::matrix::{singular_values_2x2, DenseMatrix};
use crate::pluecker::{
    eval_system, from_transformed, invariant_residuals, pluecker4x2, quadratic_forms,
    EllipticParams, PlueckerCoords, DEFAULT_FORM_BOUND,
};
use crate::stiefel::StiefelMatrix;

const THREE_HALVES_PI: f64 = 1.5 * std::f64::consts::PI;

pub const EXTREMAL_TOL: f64 = 1e-14;
pub const ELLIPSE_TOL: f64 = 1e-12;
pub const FORM_TOL: f64 = 1e-12;
/// How close the largest quadratic form must come to the bound.
pub const FORM_TIGHTNESS_TOL: f64 = 1e-9;
pub const BOUNDARY_VALUE_TOL: f64 = 1e-12;
/// Lipschitz constant used for the lemma's grid margin.
pub const LEMMA_LIPSCHITZ: f64 = 2.0;
/// A point counts as reaching an angle-sum level set when its sum is within this of 1.
pub const LEVEL_TOL: f64 = 1e-12;
/// Allowed excess of `x + y + z` beyond `3π/2` on the wrong side.
pub const ANGLE_SUM_TOL: f64 = 1e-9;
pub const FEASIBLE_TOL: f64 = 1e-12;

/// The 4×2 matrix whose best square submatrix has `σ_min = 1/2`.
pub fn extremal_matrix() -> StiefelMatrix {
    let h = 0.5f64.sqrt();
    let e = 0.125f64.sqrt();
    let t = 0.375f64.sqrt();
    let m = DenseMatrix::from_rows(&[[h, e], [-h, e], [0.0, t], [0.0, t]]).expect("4x2");
    StiefelMatrix::new(m).expect("orthonormal columns")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubCheck {
    pub name: String,
    pub passed: bool,
    pub max_violation: f64,
    pub tolerance: f64,
    pub witness: Option<Vec<f64>>,
}

impl SubCheck {
    fn new(name: &str, max_violation: f64, tolerance: f64, witness: Option<Vec<f64>>) -> Self {
        Self {
            name: name.to_owned(),
            passed: max_violation <= tolerance,
            max_violation,
            tolerance,
            witness,
        }
    }

    fn severity(&self) -> f64 {
        self.max_violation / self.tolerance
    }
}

/// Outcome of one proof step.
///
/// `max_violation`, `tolerance` and `witness` are those of the sub-check with
/// the largest violation-to-tolerance ratio, so `passed` holds exactly when
/// `max_violation <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub max_violation: f64,
    pub witness: Option<Vec<f64>>,
    pub samples_used: u64,
    pub tolerance: f64,
    /// Largest value of the check's primary quantity.
    pub extremum: f64,
    pub sub_checks: Vec<SubCheck>,
}

impl CheckResult {
    fn from_subs(name: &str, samples_used: u64, extremum: f64, sub_checks: Vec<SubCheck>) -> Self {
        let worst = sub_checks
            .iter()
            .max_by(|a, b| a.severity().total_cmp(&b.severity()))
            .expect("at least one sub-check")
            .clone();
        Self {
            name: name.to_owned(),
            passed: sub_checks.iter().all(|s| s.passed),
            max_violation: worst.max_violation,
            witness: worst.witness,
            samples_used,
            tolerance: worst.tolerance,
            extremum,
            sub_checks,
        }
    }

    pub fn sub_check(&self, name: &str) -> Option<&SubCheck> {
        self.sub_checks.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyConfig {
    pub ellipse_grid: usize,
    pub transform_grid: usize,
    pub lemma_grid: usize,
    pub implications_grid: usize,
    /// Extra uniformly random points for the implication search.
    pub random_probes: usize,
    pub seed: u64,
    /// Candidate bound for the quadratic forms.
    pub bound: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            ellipse_grid: 1001,
            transform_grid: 1001,
            lemma_grid: 2001,
            implications_grid: 201,
            random_probes: 0,
            seed: 0,
            bound: DEFAULT_FORM_BOUND,
        }
    }
}

impl CertifyConfig {
    /// Same grid size for every check.
    pub fn uniform(grid: usize) -> Self {
        Self {
            ellipse_grid: grid,
            transform_grid: grid,
            lemma_grid: grid,
            implications_grid: grid,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
    pub config: CertifyConfig,
    /// The quadratic-form bound confirmed by the transform check, if it passed.
    pub verified_bound: Option<f64>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
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

/// Tracks the maximum of a quantity and where it occurred.
struct ArgMax {
    value: f64,
    at: Option<Vec<f64>>,
}

impl ArgMax {
    fn new() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            at: None,
        }
    }

    fn offer(&mut self, value: f64, at: impl FnOnce() -> Vec<f64>) {
        if value > self.value {
            self.value = value;
            self.at = Some(at());
        }
    }
}

// ---------------------------------------------------------------------------
// Extremal matrix

fn subset_sigmas(m: &DenseMatrix) -> Vec<f64> {
    (0..m.rows())
        .combinations(2)
        .map(|r| {
            let (a, b) = (m.row(r[0]), m.row(r[1]));
            singular_values_2x2([[a[0], a[1]], [b[0], b[1]]]).1
        })
        .collect()
}

fn extremal_measures(m: &DenseMatrix) -> (f64, f64) {
    let ortho = m.orthonormality_residual();
    let top = subset_sigmas(m)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    (ortho, top)
}

/// Checks that `m` has orthonormal columns and that its best 2×2 row
/// submatrix has `σ_min` exactly `1/2`.
pub fn check_extremal_candidate(m: &DenseMatrix) -> CheckResult {
    if (m.rows(), m.cols()) != (4, 2) {
        let sub = SubCheck::new("shape", f64::INFINITY, EXTREMAL_TOL, None);
        return CheckResult::from_subs("extremal_matrix", 0, f64::NAN, vec![sub]);
    }
    let (ortho, top) = extremal_measures(m);
    let witness = || Some(m.as_slice().to_vec());
    let subs = vec![
        SubCheck::new("orthonormality", ortho, EXTREMAL_TOL, witness()),
        SubCheck::new("submatrix_upper_bound", top - 0.5, EXTREMAL_TOL, witness()),
        SubCheck::new("sharpness", (top - 0.5).abs(), EXTREMAL_TOL, witness()),
    ];
    CheckResult::from_subs("extremal_matrix", 6, top, subs)
}

pub fn check_extremal_matrix() -> CheckResult {
    check_extremal_candidate(extremal_matrix().matrix())
}

// ---------------------------------------------------------------------------
// Ellipse region

/// `(cos α·cos β, sin α·sin β)`.
fn block_minors(alpha: f64, beta: f64) -> (f64, f64) {
    (alpha.cos() * beta.cos(), alpha.sin() * beta.sin())
}

/// `(4u² + (4/3)v², (4/3)u² + 4v²)` at `(α, β)`.
pub fn ellipse_lhs(alpha: f64, beta: f64) -> (f64, f64) {
    let (u, v) = block_minors(alpha, beta);
    let (u2, v2) = (u * u, v * v);
    (4.0 * u2 + 4.0 / 3.0 * v2, 4.0 / 3.0 * u2 + 4.0 * v2)
}

/// Over `(α, β) ∈ [0, π/6] × [π/3, π/2]`, both ellipse inequalities hold.
pub fn check_ellipse_region(grid_n: usize) -> CheckResult {
    let alphas = linspace(0.0, FRAC_PI_6, grid_n);
    let betas = linspace(FRAC_PI_3, FRAC_PI_2, grid_n);
    let mut first = ArgMax::new();
    let mut second = ArgMax::new();
    for &a in &alphas {
        for &b in &betas {
            let (l1, l2) = ellipse_lhs(a, b);
            first.offer(l1, || vec![a, b]);
            second.offer(l2, || vec![a, b]);
        }
    }
    let extremum = first.value.max(second.value);
    let subs = vec![
        SubCheck::new("ellipse_1", first.value - 1.0, ELLIPSE_TOL, first.at),
        SubCheck::new("ellipse_2", second.value - 1.0, ELLIPSE_TOL, second.at),
    ];
    let samples = (alphas.len() * betas.len()) as u64;
    CheckResult::from_subs("ellipse_region", samples, extremum, subs)
}

// ---------------------------------------------------------------------------
// Transform bound

/// Transformed pair `(a, b)` for one of the three Plücker pairs when the
/// first member is `first` and the second is `second`
/// (`(p12, p34)`, `(p13, p24)`, `(p14, p23)`).
fn pair_image(pair: usize, first: f64, second: f64) -> (f64, f64) {
    match pair {
        0 => (first + second, first - second),
        1 => (first - second, first + second),
        _ => (first + second, first - second),
    }
}

/// Largest of `a² ± ab + b²` at grid point `(α, β)` with the given signs.
pub fn transform_form_max(
    alpha: f64,
    beta: f64,
    sign_first: f64,
    sign_second: f64,
    pair: usize,
) -> f64 {
    let (u, v) = block_minors(alpha, beta);
    let (a, b) = pair_image(pair, sign_first * u, sign_second * v);
    let (plus, minus) = quadratic_forms(a, b);
    plus.max(minus)
}

/// Maps the achievable `(|p12|, |p34|)` set through every sign choice and the
/// change of variables, and checks that `a² ± ab + b²` peaks at `bound`.
pub fn check_transform_bound(grid_n: usize, bound: f64) -> CheckResult {
    let alphas = linspace(0.0, FRAC_PI_6, grid_n);
    let betas = linspace(FRAC_PI_3, FRAC_PI_2, grid_n);
    let mut best = ArgMax::new();
    let mut samples = 0u64;
    for &a in &alphas {
        for &b in &betas {
            for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                for pair in 0..3 {
                    let f = transform_form_max(a, b, s1, s2, pair);
                    best.offer(f, || vec![a, b, s1, s2, pair as f64, bound]);
                    samples += 1;
                }
            }
        }
    }
    let subs = vec![
        SubCheck::new(
            "never_exceeds",
            best.value - bound,
            FORM_TOL,
            best.at.clone(),
        ),
        SubCheck::new(
            "attains",
            (best.value - bound).abs(),
            FORM_TIGHTNESS_TOL,
            best.at,
        ),
    ];
    CheckResult::from_subs("transform_bound", samples, best.value, subs)
}

// ---------------------------------------------------------------------------
// Boundary lemma

pub fn lemma_value(x: f64, y: f64, z: f64) -> f64 {
    x.sin().powi(2) + y.sin().powi(2) + z.sin().powi(2)
}

/// `sin²x + sin²y + sin²z ≤ 1` on the triangle `x + y + z = π/2`, checked on
/// a barycentric grid with the margin `L·h` (`h` the cell diameter), and
/// equal to 1 on the edges.
pub fn check_boundary_lemma(grid_n: usize) -> CheckResult {
    let m = grid_n.max(2) - 1;
    let step = FRAC_PI_2 / m as f64;
    let coord = |i: usize| if i == m { FRAC_PI_2 } else { i as f64 * step };
    let table: Vec<f64> = (0..=m).map(|i| coord(i).sin().powi(2)).collect();
    let mesh = std::f64::consts::SQRT_2 * step;

    let mut interior = ArgMax::new();
    let mut edge = ArgMax::new();
    let mut samples = 0u64;
    for i in 0..=m {
        for j in 0..=m - i {
            let l = m - i - j;
            let f = table[i] + table[j] + table[l];
            samples += 1;
            let at = || vec![coord(i), coord(j), coord(l)];
            interior.offer(f, at);
            if i == 0 || j == 0 || l == 0 {
                edge.offer((f - 1.0).abs(), at);
            }
        }
    }
    let subs = vec![
        SubCheck::new(
            "interior_bound",
            interior.value - 1.0,
            LEMMA_LIPSCHITZ * mesh,
            interior.at,
        ),
        SubCheck::new("boundary_value", edge.value, BOUNDARY_VALUE_TOL, edge.at),
    ];
    CheckResult::from_subs("boundary_lemma", samples, interior.value, subs)
}

// ---------------------------------------------------------------------------
// Implications

/// Signed excess of `x + y + z` past `3π/2` on the side the implication
/// forbids, for points on or above the level set; `−∞` otherwise.
///
/// `first`: `s_plus ≥ 1` must force `x + y + z ≤ 3π/2`.
/// Otherwise: `s_minus ≥ 1` must force `x + y + z ≥ 3π/2`.
pub fn implication_excess(first: bool, x: f64, y: f64, z: f64) -> f64 {
    let (plus, minus) = crate::pluecker::eq3_sums(x, y, z);
    excess_from(first, plus, minus, x + y + z)
}

fn excess_from(first: bool, plus: f64, minus: f64, sum: f64) -> f64 {
    if first {
        if plus >= 1.0 - LEVEL_TOL {
            sum - THREE_HALVES_PI
        } else {
            f64::NEG_INFINITY
        }
    } else if minus >= 1.0 - LEVEL_TOL {
        THREE_HALVES_PI - sum
    } else {
        f64::NEG_INFINITY
    }
}

/// Falsification search for both implications over `[π/3, 2π/3]³`.
pub fn check_implications(grid_n: usize) -> CheckResult {
    check_implications_with_probes(grid_n, 0, 0)
}

pub fn check_implications_with_probes(
    grid_n: usize,
    random_probes: usize,
    seed: u64,
) -> CheckResult {
    let lo = FRAC_PI_3;
    let hi = 2.0 * FRAC_PI_3;
    let grid = linspace(lo, hi, grid_n);
    let step = (hi - lo) / (grid.len() - 1) as f64;
    let sq_plus: Vec<f64> = grid.iter().map(|t| (t + FRAC_PI_3).sin().powi(2)).collect();
    let sq_minus: Vec<f64> = grid.iter().map(|t| (t - FRAC_PI_3).sin().powi(2)).collect();

    let mut worst = [ArgMax::new(), ArgMax::new()];
    let mut near: Vec<[f64; 3]> = Vec::new();
    let near_threshold = -10.0 * ANGLE_SUM_TOL;
    let mut samples = 0u64;

    for (i, &x) in grid.iter().enumerate() {
        for (j, &y) in grid.iter().enumerate() {
            for (l, &z) in grid.iter().enumerate() {
                let plus = sq_plus[i] + sq_plus[j] + sq_plus[l];
                let minus = sq_minus[i] + sq_minus[j] + sq_minus[l];
                let sum = x + y + z;
                let mut is_near = false;
                for (slot, first) in [(0, true), (1, false)] {
                    let e = excess_from(first, plus, minus, sum);
                    worst[slot].offer(e, || vec![x, y, z]);
                    is_near |= e > near_threshold;
                }
                samples += 1;
                if is_near {
                    near.push([x, y, z]);
                }
            }
        }
    }

    // One level of local refinement around near-violations.
    let probe = |p: [f64; 3], worst: &mut [ArgMax; 2]| {
        for (slot, first) in [(0, true), (1, false)] {
            let e = implication_excess(first, p[0], p[1], p[2]);
            worst[slot].offer(e, || p.to_vec());
        }
    };
    const SUB: usize = 11;
    for c in &near {
        let axes: Vec<Vec<f64>> = c
            .iter()
            .map(|&t| linspace((t - step).max(lo), (t + step).min(hi), SUB))
            .collect();
        for &x in &axes[0] {
            for &y in &axes[1] {
                for &z in &axes[2] {
                    probe([x, y, z], &mut worst);
                    samples += 1;
                }
            }
        }
    }

    if random_probes > 0 {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        for _ in 0..random_probes {
            let p = [
                rng.random_range(lo..=hi),
                rng.random_range(lo..=hi),
                rng.random_range(lo..=hi),
            ];
            probe(p, &mut worst);
            samples += 1;
        }
    }

    let [first, second] = worst;
    let extremum = first.value.max(second.value);
    let subs = vec![
        SubCheck::new("first_implication", first.value, ANGLE_SUM_TOL, first.at),
        SubCheck::new("second_implication", second.value, ANGLE_SUM_TOL, second.at),
    ];
    CheckResult::from_subs("implications", samples, extremum, subs)
}

// ---------------------------------------------------------------------------
// Feasible point

/// Radii 1 and angles `(π/2, π/3, 2π/3)`: the contact point.
pub fn contact_params() -> EllipticParams {
    EllipticParams {
        big_x: 1.0,
        big_y: 1.0,
        big_z: 1.0,
        x: FRAC_PI_2,
        y: FRAC_PI_3,
        z: 2.0 * FRAC_PI_3,
    }
}

/// Smallest max-norm distance between `p` and the Plücker vector of any
/// matrix obtained from the extremal one by row permutations, row sign
/// flips and a column-basis sign change.
pub fn distance_to_extremal_orbit(p: &PlueckerCoords) -> f64 {
    let reference = pluecker4x2(&extremal_matrix()).expect("4x2");
    let target = p.to_array();
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut best = f64::INFINITY;
    for perm in (0..4).permutations(4) {
        for signs in 0..16u32 {
            let eps = |r: usize| if signs >> r & 1 == 1 { -1.0 } else { 1.0 };
            for global in [1.0, -1.0] {
                let d = pairs
                    .iter()
                    .zip(target)
                    .map(|(&(i, j), t)| {
                        let v = global * eps(i) * eps(j) * reference.minor(perm[i], perm[j]);
                        (v - t).abs()
                    })
                    .fold(0.0, f64::max);
                best = best.min(d);
            }
        }
    }
    best
}

fn feasible_measures(params: &EllipticParams, bound: f64) -> Vec<(&'static str, f64)> {
    let v = params.to_transformed();
    let p = from_transformed(&v);
    let (relation, normalization) = invariant_residuals(&p);
    let sys = eval_system(&v, bound, 0.0);
    let q = sys.qform_values;
    let form_excess = q.iter().fold(f64::NEG_INFINITY, |m, &f| m.max(f - bound));
    let form_equality = (0..3)
        .map(|pair| {
            (q[2 * pair] - bound)
                .abs()
                .min((q[2 * pair + 1] - bound).abs())
        })
        .fold(0.0, f64::max);
    vec![
        ("pluecker_relation", relation),
        ("normalization", normalization),
        ("sphere_1", sys.sphere1_residual),
        ("sphere_2", sys.sphere2_residual),
        ("form_bound", form_excess),
        ("form_equality", form_equality),
        ("extremal_orbit", distance_to_extremal_orbit(&p)),
    ]
}

/// Rebuilds the Plücker vector from sector parameters and checks it is a
/// solution of the full system at the bound, matching the extremal matrix.
pub fn check_feasible_point_at(params: &EllipticParams, bound: f64) -> CheckResult {
    let witness = vec![
        params.big_x,
        params.big_y,
        params.big_z,
        params.x,
        params.y,
        params.z,
        bound,
    ];
    let measures = feasible_measures(params, bound);
    let q = eval_system(&params.to_transformed(), bound, 0.0).qform_values;
    let extremum = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let subs = measures
        .into_iter()
        .map(|(name, v)| SubCheck::new(name, v, FEASIBLE_TOL, Some(witness.clone())))
        .collect();
    CheckResult::from_subs("feasible_point", 1, extremum, subs)
}

pub fn check_feasible_point() -> CheckResult {
    check_feasible_point_at(&contact_params(), DEFAULT_FORM_BOUND)
}

// ---------------------------------------------------------------------------

/// Recomputes a sub-check's violation from its witness alone.
///
/// Returns `None` for unknown names or missing witnesses.
pub fn reevaluate(check: &str, sub: &str, witness: &[f64]) -> Option<f64> {
    match (check, sub) {
        ("extremal_matrix", _) => {
            let m = DenseMatrix::new(4, 2, witness.to_vec()).ok()?;
            let (ortho, top) = extremal_measures(&m);
            match sub {
                "orthonormality" => Some(ortho),
                "submatrix_upper_bound" => Some(top - 0.5),
                "sharpness" => Some((top - 0.5).abs()),
                _ => None,
            }
        }
        ("ellipse_region", "ellipse_1") => Some(ellipse_lhs(witness[0], witness[1]).0 - 1.0),
        ("ellipse_region", "ellipse_2") => Some(ellipse_lhs(witness[0], witness[1]).1 - 1.0),
        ("transform_bound", _) => {
            let &[a, b, s1, s2, pair, bound] = witness else {
                return None;
            };
            let f = transform_form_max(a, b, s1, s2, pair as usize);
            match sub {
                "never_exceeds" => Some(f - bound),
                "attains" => Some((f - bound).abs()),
                _ => None,
            }
        }
        ("boundary_lemma", "interior_bound") => {
            Some(lemma_value(witness[0], witness[1], witness[2]) - 1.0)
        }
        ("boundary_lemma", "boundary_value") => {
            Some((lemma_value(witness[0], witness[1], witness[2]) - 1.0).abs())
        }
        ("implications", "first_implication") => {
            Some(implication_excess(true, witness[0], witness[1], witness[2]))
        }
        ("implications", "second_implication") => Some(implication_excess(
            false, witness[0], witness[1], witness[2],
        )),
        ("feasible_point", _) => {
            let &[big_x, big_y, big_z, x, y, z, bound] = witness else {
                return None;
            };
            let params = EllipticParams {
                big_x,
                big_y,
                big_z,
                x,
                y,
                z,
            };
            feasible_measures(&params, bound)
                .into_iter()
                .find(|(name, _)| *name == sub)
                .map(|(_, v)| v)
        }
        _ => None,
    }
}

/// Runs every check in order and assembles the report.
pub fn run_all(config: &CertifyConfig) -> CertificateReport {
    let transform = check_transform_bound(config.transform_grid, config.bound);
    let verified_bound = transform.passed.then_some(config.bound);
    let checks = vec![
        check_extremal_matrix(),
        check_ellipse_region(config.ellipse_grid),
        transform,
        check_boundary_lemma(config.lemma_grid),
        check_implications_with_probes(config.implications_grid, config.random_probes, config.seed),
        check_feasible_point_at(&contact_params(), config.bound),
    ];
    CertificateReport {
        all_passed: checks.iter().all(|c| c.passed),
        checks,
        config: config.clone(),
        verified_bound,
    }
}

//! Minimax search over the Grassmannian: look for subspaces whose best square
//! row submatrix is as badly conditioned as possible.
//!
//! The objective `max_S σ_min(A[S, :])` is nonsmooth exactly where several
//! row subsets tie, which is where the minimizers sit. The search is a
//! derivative-free descent over Givens rotations of the ambient space.

use itertools::Itertools;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{singular_values_2x2, DenseMatrix};
use crate::stiefel::{
    binomial, haar_sample, max_subset_sigma_min, orthonormalize, sigma_min, StiefelMatrix,
    DEFAULT_ENUMERATION_CAP, DEFAULT_RANK_TOL,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchParams {
    pub restarts: usize,
    pub max_iters: usize,
    pub initial_step: f64,
    pub step_shrink: f64,
    pub stop_step: f64,
    pub seed: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 2000,
            initial_step: 0.3,
            step_shrink: 0.5,
            stop_step: 1e-7,
            seed: 0,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParams("restarts must be positive".into()));
        }
        if !(self.initial_step > 0.0 && self.stop_step > 0.0) {
            return Err(Error::InvalidParams("step sizes must be positive".into()));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::InvalidParams(
                "step_shrink must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseResult {
    pub best_matrix: StiefelMatrix,
    pub best_value: f64,
    pub per_restart_values: Vec<f64>,
    pub iterations_used: Vec<usize>,
}

impl Serialize for WorstCaseResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            k: usize,
            best_value: f64,
            best_matrix: String,
            per_restart_values: &'a [f64],
            iterations_used: &'a [usize],
        }
        Repr {
            n: self.best_matrix.n(),
            k: self.best_matrix.k(),
            best_value: self.best_value,
            best_matrix: self.best_matrix.matrix().to_string(),
            per_restart_values: &self.per_restart_values,
            iterations_used: &self.iterations_used,
        }
        .serialize(s)
    }
}

/// `max` over row subsets of the subset's smallest singular value.
pub fn objective(a: &StiefelMatrix) -> Result<f64> {
    max_subset_sigma_min(a)
}

fn subset_objective(m: &DenseMatrix, subsets: &[Vec<usize>]) -> f64 {
    subsets
        .iter()
        .map(|rows| match rows[..] {
            [i] => m.get(i, 0).abs(),
            [i, j] => {
                let (a, b) = (m.row(i), m.row(j));
                singular_values_2x2([[a[0], a[1]], [b[0], b[1]]]).1
            }
            _ => sigma_min(&m.select_rows(rows)).expect("square"),
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn givens(m: &DenseMatrix, i: usize, j: usize, angle: f64) -> DenseMatrix {
    let (s, c) = angle.sin_cos();
    let mut out = m.clone();
    for col in 0..m.cols() {
        let (a, b) = (m.get(i, col), m.get(j, col));
        out.set(i, col, c * a - s * b);
        out.set(j, col, s * a + c * b);
    }
    out
}

#[derive(Debug, Clone)]
struct DescentOutcome {
    matrix: StiefelMatrix,
    value: f64,
    iterations: usize,
    /// Objective after each accepted step, starting with the initial value.
    trace: Vec<f64>,
}

fn descend(a0: &StiefelMatrix, params: &SearchParams) -> Result<DescentOutcome> {
    let (n, k) = (a0.n(), a0.k());
    let count = binomial(n, k);
    if count > DEFAULT_ENUMERATION_CAP {
        return Err(Error::EnumerationCapExceeded {
            n,
            k,
            count,
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    let subsets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    let mut current = a0.clone();
    let mut value = subset_objective(current.matrix(), &subsets);
    let mut trace = vec![value];
    let mut step = params.initial_step;
    let mut iterations = 0;

    while iterations < params.max_iters && step >= params.stop_step {
        iterations += 1;
        let mut best: Option<(StiefelMatrix, f64)> = None;
        for (i, j) in (0..n).tuple_combinations() {
            for angle in [step, -step] {
                let rotated = givens(current.matrix(), i, j, angle);
                let Ok(candidate) = orthonormalize(&rotated, DEFAULT_RANK_TOL) else {
                    continue;
                };
                let v = subset_objective(candidate.matrix(), &subsets);
                if v < best.as_ref().map_or(value, |b| b.1) {
                    best = Some((candidate, v));
                }
            }
        }
        match best {
            Some((m, v)) => {
                current = m;
                value = v;
                trace.push(value);
            }
            None => step *= params.step_shrink,
        }
    }
    Ok(DescentOutcome {
        value,
        matrix: current,
        iterations,
        trace,
    })
}

/// Givens-neighbourhood descent from `a0`.
///
/// Every round tries `G(i, j, ±θ)` for all coordinate pairs, re-orthonormalizes,
/// and moves to the candidate with the smallest objective if it is a strict
/// decrease (first such candidate on ties). `θ` is multiplied by
/// `step_shrink` after a round without improvement; the search stops once
/// `θ < stop_step` or after `max_iters` rounds.
pub fn local_descent(a0: &StiefelMatrix, params: &SearchParams) -> Result<(StiefelMatrix, f64)> {
    let out = descend(a0, params)?;
    Ok((out.matrix, out.value))
}

/// Objective values along the accepted iterates of [`local_descent`].
pub fn descent_trace(a0: &StiefelMatrix, params: &SearchParams) -> Result<Vec<f64>> {
    Ok(descend(a0, params)?.trace)
}

/// Independent descents from `haar_sample(n, k, seed + i)`; keeps the smallest
/// final value, ties going to the lowest restart index.
pub fn multistart_search(n: usize, k: usize, params: &SearchParams) -> Result<WorstCaseResult> {
    if k == 0 || k >= n {
        return Err(Error::Dimension(format!(
            "search needs 1 <= k <= n - 1, got n={n}, k={k}"
        )));
    }
    params.validate()?;
    let mut runs = Vec::with_capacity(params.restarts);
    for r in 0..params.restarts {
        let start = haar_sample(n, k, params.seed.wrapping_add(r as u64))?;
        runs.push(descend(&start, params)?);
    }
    let best = runs
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.value.total_cmp(&b.value).then(ia.cmp(ib)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    Ok(WorstCaseResult {
        best_matrix: runs[best].matrix.clone(),
        best_value: runs[best].value,
        per_restart_values: runs.iter().map(|r| r.value).collect(),
        iterations_used: runs.iter().map(|r| r.iterations).collect(),
    })
}

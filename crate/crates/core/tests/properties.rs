use itertools::Itertools;
use nalgebra::DMatrix;
use proptest::prelude::*;

use submatrix_core::certify::{reevaluate, run_all, CertifyConfig};
use submatrix_core::csdecomp::{cs_decompose, minors_from_cs};
use submatrix_core::json::to_json;
use submatrix_core::matrix::householder_qr;
use submatrix_core::pluecker::{
    elliptic_params, eval_system, from_transformed, invariant_residuals, pluecker4x2,
    quadratic_forms, sector_params, sector_point, to_transformed,
};
use submatrix_core::stiefel::{best_submatrix, haar_sample, orthonormalize, sigma_min};
use submatrix_core::worstcase::objective;
use submatrix_core::{DenseMatrix, StiefelMatrix};

fn to_nalgebra(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn oracle_sigma_min(m: &DenseMatrix) -> f64 {
    to_nalgebra(m).singular_values().min()
}

fn random_rotation(k: usize, seed: u64) -> DenseMatrix {
    haar_sample(k, k, seed).unwrap().into_matrix()
}

#[test]
fn sigma_min_matches_nalgebra_svd() {
    for (n, k) in [(3, 1), (4, 2), (5, 2), (5, 3), (6, 3), (7, 4)] {
        for seed in 0..40 {
            let a = haar_sample(n, k, seed).unwrap();
            for rows in (0..n).combinations(k) {
                let sub = a.matrix().select_rows(&rows);
                let ours = sigma_min(&sub).unwrap();
                let theirs = oracle_sigma_min(&sub);
                assert!(
                    (ours - theirs).abs() < 1e-12,
                    "{n}x{k} seed {seed}: {ours} vs {theirs}"
                );
            }
        }
    }
}

#[test]
fn best_submatrix_matches_brute_force_oracle() {
    for (n, k) in [(4, 2), (5, 2), (6, 3)] {
        for seed in 100..130 {
            let a = haar_sample(n, k, seed).unwrap();
            let report = best_submatrix(&a).unwrap();
            let oracle = (0..n)
                .combinations(k)
                .map(|r| oracle_sigma_min(&a.matrix().select_rows(&r)))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((report.sigma_min - oracle).abs() < 1e-12);
            let det = to_nalgebra(&a.matrix().select_rows(&report.row_set)).determinant();
            assert!((report.determinant - det).abs() < 1e-12);
        }
    }
}

#[test]
fn qr_reproduces_input_with_nonnegative_diagonal() {
    let a = haar_sample(6, 3, 5).unwrap();
    let raw = DenseMatrix::from_rows(&[
        [1.0, 2.0, 0.5],
        [0.0, -1.0, 3.0],
        [4.0, 0.0, 1.0],
        [2.0, 2.0, 2.0],
        [-1.0, 0.5, 0.0],
        [0.3, 0.1, -0.7],
    ])
    .unwrap();
    for m in [a.matrix().clone(), raw] {
        let (q, r) = householder_qr(&m).unwrap();
        assert!(q.orthonormality_residual() < 1e-14);
        assert!(q.matmul(&r).unwrap().max_abs_diff(&m) < 1e-13);
        for i in 0..r.rows() {
            assert!(r.get(i, i) >= 0.0);
            for j in 0..i {
                assert_eq!(r.get(i, j), 0.0);
            }
        }
    }
}

#[test]
fn haar_samples_are_deterministic_and_orthonormal() {
    let a = haar_sample(7, 3, 42).unwrap();
    let b = haar_sample(7, 3, 42).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, haar_sample(7, 3, 43).unwrap());
    assert!(a.matrix().orthonormality_residual() < 1e-14);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let config = CertifyConfig::uniform(41);
    assert_eq!(to_json(&run_all(&config)), to_json(&run_all(&config)));
    let a = haar_sample(5, 2, 3).unwrap();
    assert_eq!(
        to_json(&best_submatrix(&a).unwrap()),
        to_json(&best_submatrix(&a).unwrap())
    );
}

#[test]
fn certificate_witnesses_reproduce_reported_violations() {
    let report = run_all(&CertifyConfig::uniform(61));
    assert!(report.all_passed);
    for check in &report.checks {
        for sub in &check.sub_checks {
            let Some(w) = &sub.witness else { continue };
            let again = reevaluate(&check.name, &sub.name, w)
                .unwrap_or_else(|| panic!("{}/{} not re-evaluable", check.name, sub.name));
            assert!(
                (again - sub.max_violation).abs() <= 1e-15 * (1.0 + sub.max_violation.abs()),
                "{}/{}: reported {} recomputed {}",
                check.name,
                sub.name,
                sub.max_violation,
                again
            );
        }
    }
}

#[test]
fn wrong_bound_is_rejected_by_certificate() {
    let mut config = CertifyConfig::uniform(61);
    config.bound = 1.5;
    let report = run_all(&config);
    assert!(!report.all_passed);
    assert_eq!(report.verified_bound, None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objective_is_grassmann_invariant(seed in any::<u64>(), q_seed in any::<u64>(), nk in 0usize..4) {
        let (n, k) = [(4, 2), (5, 2), (5, 3), (6, 2)][nk];
        let a = haar_sample(n, k, seed).unwrap();
        let rotated = a.rotate_basis(&random_rotation(k, q_seed)).unwrap();
        prop_assert!((objective(&a).unwrap() - objective(&rotated).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn four_by_two_bound_holds(seed in any::<u64>()) {
        let a = haar_sample(4, 2, seed).unwrap();
        prop_assert!(best_submatrix(&a).unwrap().sigma_min >= 0.5 - 1e-9);
    }

    #[test]
    fn subset_sigma_lies_in_unit_interval(seed in any::<u64>(), nk in 0usize..4) {
        let (n, k) = [(3, 1), (4, 2), (6, 3), (7, 2)][nk];
        let a = haar_sample(n, k, seed).unwrap();
        for v in best_submatrix(&a).unwrap().all_values {
            prop_assert!(v.sigma_min >= 0.0 && v.sigma_min <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn orthonormalize_is_idempotent(seed in any::<u64>()) {
        let a = haar_sample(6, 3, seed).unwrap();
        let again = orthonormalize(a.matrix(), 1e-10).unwrap();
        prop_assert!(again.matrix().max_abs_diff(a.matrix()) < 1e-14);
    }

    #[test]
    fn transformed_variables_round_trip(seed in any::<u64>()) {
        let a = haar_sample(4, 2, seed).unwrap();
        let p = pluecker4x2(&a).unwrap();
        let back = from_transformed(&to_transformed(&p));
        for (x, y) in p.to_array().iter().zip(back.to_array()) {
            prop_assert!((x - y).abs() < 1e-14);
        }
        let (rel, norm) = invariant_residuals(&p);
        prop_assert!(rel < 1e-12 && norm < 1e-12);
        // The form bounds only hold under the contradiction hypothesis; the
        // spheres hold for every subspace.
        let s = eval_system(&to_transformed(&p), 0.75, 1e-12);
        prop_assert!(s.sphere1_residual < 1e-12 && s.sphere2_residual < 1e-12, "{s:?}");
    }

    #[test]
    fn sector_map_identity(radius in 0.0f64..2.0, angle in 1.0471975511965976f64..2.0943951023931957) {
        let (a, b) = sector_point(radius, angle);
        let (plus, _) = quadratic_forms(a, b);
        prop_assert!((plus - 0.75 * radius * radius).abs() < 1e-12);
        prop_assert!(a >= -1e-15 && b >= -1e-15);
        let (r2, t2) = sector_params(a, b);
        prop_assert!((r2 - radius).abs() < 1e-12);
        if radius > 1e-6 {
            prop_assert!((t2 - angle).abs() < 1e-9);
        }
    }

    #[test]
    fn elliptic_params_rebuild_nonnegative_representative(seed in any::<u64>()) {
        let a = haar_sample(4, 2, seed).unwrap();
        let v = to_transformed(&pluecker4x2(&a).unwrap()).nonnegative_representative();
        let back = elliptic_params(&v).unwrap().to_transformed();
        for ((x, y), (u, w)) in v.pairs().iter().zip(back.pairs()) {
            prop_assert!((x - u).abs() < 1e-12 && (y - w).abs() < 1e-12);
        }
    }

    #[test]
    fn cs_factors_reconstruct(seed in any::<u64>()) {
        let a = haar_sample(4, 2, seed).unwrap();
        let f = cs_decompose(&a).unwrap();
        let r = f.reconstruct();
        for (i, row) in r.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                prop_assert!((v - a.get(i, j)).abs() < 1e-10);
            }
        }
        let p = pluecker4x2(&a).unwrap();
        let (c, s) = minors_from_cs(&f);
        prop_assert!((c - p.p12.abs()).abs() < 1e-10);
        prop_assert!((s - p.p34.abs()).abs() < 1e-10);
    }
}

#[test]
fn stiefel_rejects_non_orthonormal_input() {
    let m = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.1, 0.0]]).unwrap();
    assert!(StiefelMatrix::new(m).is_err());
}

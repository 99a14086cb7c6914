// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use czsim_core::simplex::*;
use proptest::prelude::*;

#[test]
fn quadratic_bowl() {
    let r = nelder_mead_minimize(
        |x| (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2),
        initial_simplex(&[5.0, 5.0], &[1.0, 1.0]),
        Tolerances::default(),
    );
    assert!((r.point[0] - 1.0).abs() < 1e-6 && (r.point[1] + 2.0).abs() < 1e-6);
    assert!(!r.hit_iteration_cap);
}

#[test]
fn rosenbrock() {
    let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
    let r = nelder_mead_minimize(
        f,
        initial_simplex(&[-1.2, 1.0], &[0.1, 0.1]),
        Tolerances::default(),
    );
    assert!(
        (r.point[0] - 1.0).abs() < 1e-4 && (r.point[1] - 1.0).abs() < 1e-4,
        "{:?}",
        r.point
    );
}

#[test]
fn absolute_value() {
    let r = nelder_mead_minimize(
        |x| x[0].abs(),
        initial_simplex(&[3.3], &[0.7]),
        Tolerances::default(),
    );
    assert!(r.point[0].abs() < 1e-6);
}

#[test]
fn iteration_cap_is_flagged() {
    let tol = Tolerances {
        diameter: 0.0,
        spread: 0.0,
        iterations_per_dim: 5,
    };
    let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
    let r = nelder_mead_minimize(f, initial_simplex(&[-1.2, 1.0], &[0.1, 0.1]), tol);
    assert!(r.hit_iteration_cap);
    assert_eq!(r.iterations, 10);
}

proptest! {
    #[test]
    fn finds_shifted_quadratic_minimum(cx in -10.0f64..10.0, cy in -10.0f64..10.0, cz in -10.0f64..10.0) {
        let f = |x: &[f64]| (x[0] - cx).powi(2) + 2.0 * (x[1] - cy).powi(2) + 0.5 * (x[2] - cz).powi(2);
        let r = nelder_mead_minimize(f, initial_simplex(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]), Tolerances::default());
        prop_assert!((r.point[0] - cx).abs() < 1e-5);
        prop_assert!((r.point[1] - cy).abs() < 1e-5);
        prop_assert!((r.point[2] - cz).abs() < 1e-5);
    }
}

// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use czsim_core::device::{build_hamiltonian, CouplingGraph, DeviceSpec, Label};
use czsim_core::linalg::CMatrix;
use czsim_core::metrics::*;
use czsim_core::propagator::{
    propagate_with, ControlSchedule, PropagationResult, PropagatorOptions,
};
use czsim_core::pulse::{Parameterization, SampledWaveform};
use czsim_core::units::wrap_pi;
use num_complex::Complex64;
use proptest::prelude::*;

fn diag(v: [Complex64; 4]) -> CMatrix {
    CMatrix::from_fn(4, 4, |i, j| {
        if i == j {
            v[i]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Identity propagation on an uncoupled device: dressed = bare.
fn identity_result() -> PropagationResult {
    let mut spec = DeviceSpec::default();
    spec.couplings = CouplingGraph {
        g_1c: 0.0,
        g_2c: 0.0,
        g_12: 0.0,
    };
    let terms = build_hamiltonian(&spec).unwrap();
    let s = ControlSchedule::new(SampledWaveform::constant(
        0.1,
        1,
        7.0,
        Parameterization::CouplerFrequency,
    ));
    propagate_with(&terms, &s, &PropagatorOptions::computational()).unwrap()
}

fn position(r: &PropagationResult, l: Label) -> usize {
    let g = czsim_core::device::label_index(r.levels, l);
    let s: usize = l.iter().sum();
    r.sector_indices[s].iter().position(|&i| i == g).unwrap()
}

#[test]
fn canonical_targets() {
    let one = c(1.0, 0.0);
    assert_eq!(canonical_cz(), diag([one, one, one, -one]));
    let t = cz_target(VirtualZAngles::new(PI / 2.0, 0.0));
    assert!(max_abs(&(t - diag([one, c(0.0, 1.0), c(0.0, 1.0), one]))) < 1e-15);
}

#[test]
fn fidelity_reference_values() {
    let cz = canonical_cz();
    assert!((average_gate_fidelity(&cz, &cz) - 1.0).abs() < 1e-15);
    assert!((average_gate_fidelity(&CMatrix::identity(4, 4), &cz) - 0.4).abs() < 1e-15);
    // A map that loses everything scores zero; the 1/5 floor of a fully
    // depolarizing channel is not expressible as a 4 x 4 projected map.
    assert_eq!(average_gate_fidelity(&CMatrix::zeros(4, 4), &cz), 0.0);
}

#[test]
fn conditional_phase_reference_values() {
    assert!((conditional_phase(&canonical_cz()).unwrap() - PI).abs() < 1e-15);
    assert_eq!(conditional_phase(&CMatrix::identity(4, 4)).unwrap(), 0.0);
    assert!(conditional_phase(&CMatrix::zeros(4, 4)).is_err());
}

#[test]
fn identity_propagation_projects_to_identity() {
    let r = identity_result();
    let m = project_computational(&r).unwrap();
    assert!(max_abs(&(m - CMatrix::identity(4, 4))) < 1e-15);
    let leak = leakage_from_11(&r).unwrap();
    assert_eq!(leak.total, 0.0);
}

#[test]
fn leakage_free_rotation_projects_to_a_unitary() {
    let mut r = identity_result();
    let (a, b) = (position(&r, [0, 0, 1]), position(&r, [1, 0, 0]));
    let (th, ph): (f64, f64) = (0.7, 1.9);
    let blk = &mut r.blocks[1];
    blk[(a, a)] = c(th.cos(), 0.0);
    blk[(a, b)] = -Complex64::from_polar(th.sin(), -ph);
    blk[(b, a)] = Complex64::from_polar(th.sin(), ph);
    blk[(b, b)] = c(th.cos(), 0.0);
    let k = position(&r, [1, 0, 1]);
    r.blocks[2][(k, k)] = Complex64::from_polar(1.0, 0.4);
    let m = project_computational(&r).unwrap();
    let defect = max_abs(&(m.adjoint() * &m - CMatrix::identity(4, 4)));
    assert!(defect < 1e-9);
    assert!(subspace_trace_loss(&m).abs() < 1e-12);
}

#[test]
fn leaking_unitary_contracts_and_reports_levels() {
    let mut r = identity_result();
    let (p11, p200) = (position(&r, [1, 0, 1]), position(&r, [2, 0, 0]));
    let th: f64 = 0.3;
    let blk = &mut r.blocks[2];
    blk[(p11, p11)] = c(th.cos(), 0.0);
    blk[(p200, p11)] = c(th.sin(), 0.0);
    blk[(p11, p200)] = c(-th.sin(), 0.0);
    blk[(p200, p200)] = c(th.cos(), 0.0);
    let m = project_computational(&r).unwrap();
    let tr: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    assert!(tr <= 4.0);
    let leak = leakage_from_11(&r).unwrap();
    assert!((leak.total - th.sin().powi(2)).abs() < 1e-12);
    let parts: f64 = leak.per_level.iter().map(|p| p.1).sum();
    assert!(parts <= leak.total + 1e-12);
}

#[test]
fn fit_recovers_exact_target() {
    let (angles, f) = fit_virtual_z(&cz_target(VirtualZAngles::new(0.3, -0.7)));
    assert!(f > 1.0 - 1e-6);
    let same = |a: f64, b: f64| wrap_pi(a - b).abs() < 1e-4;
    let direct = same(angles.delta_plus, 0.3) && same(angles.delta_minus, -0.7);
    let shifted = same(angles.delta_plus, 0.3 + PI) && same(angles.delta_minus, -0.7 + PI);
    assert!(direct || shifted, "{angles:?}");
    let (a0, f0) = fit_virtual_z(&canonical_cz());
    assert!(f0 > 1.0 - 1e-9);
    assert!(
        wrap_pi(2.0 * a0.delta_plus).abs() < 1e-4
            && wrap_pi(a0.delta_plus - a0.delta_minus).abs() < 1e-4
    );
}

#[test]
fn corrected_unitary_removes_phases() {
    let a = VirtualZAngles::new(0.4, 1.1);
    let u = corrected_unitary(&cz_target(a), a);
    assert!(max_abs(&(u - canonical_cz())) < 1e-12);
}

proptest! {
    #[test]
    fn conditional_phase_of_any_target_is_pi(p in -PI..PI, m in -PI..PI) {
        let t = cz_target(VirtualZAngles::new(p, m));
        prop_assert!((conditional_phase(&t).unwrap().abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn fit_is_gauge_invariant(p in -PI..PI, m in -PI..PI, err in 0.0f64..0.3, g0 in -PI..PI) {
        // A slightly wrong conditional phase, dressed with arbitrary local Z and a global phase.
        let base = diag([c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), -Complex64::from_polar(1.0, err)]);
        let z = z_phases(VirtualZAngles::new(p, m));
        let dressed = CMatrix::from_fn(4, 4, |i, j| Complex64::from_polar(1.0, g0) * z[i] * base[(i, j)]);
        let (_, f0) = fit_virtual_z(&base);
        let (_, f1) = fit_virtual_z(&dressed);
        prop_assert!((f0 - f1).abs() < 1e-9);
        let phi0 = conditional_phase(&base).unwrap();
        let phi1 = conditional_phase(&dressed).unwrap();
        prop_assert!(wrap_pi(phi0 - phi1).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_bounded(re in prop::collection::vec(-1.0f64..1.0, 16), im in prop::collection::vec(-1.0f64..1.0, 16)) {
        let m = CMatrix::from_fn(4, 4, |i, j| c(re[4 * i + j], im[4 * i + j]) * 0.25);
        let f = average_gate_fidelity(&m, &canonical_cz());
        prop_assert!(f >= 0.0);
        let norm: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 4.0 {
            prop_assert!(f <= 1.0 + 1e-12);
        }
    }
}

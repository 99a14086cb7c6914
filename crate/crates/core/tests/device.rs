// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use czsim_core::device::*;
use czsim_core::Error;
use nalgebra::SymmetricEigen;
use proptest::prelude::*;

fn uncoupled() -> DeviceSpec {
    let mut s = DeviceSpec::default();
    s.couplings = CouplingGraph {
        g_1c: 0.0,
        g_2c: 0.0,
        g_12: 0.0,
    };
    s
}

fn diag_ghz(terms: &HamiltonianTerms, l: Label) -> f64 {
    let i = label_index(terms.levels, l);
    terms.static_part[(i, i)] / czsim_core::units::TWO_PI
}

#[test]
fn second_level_of_q1_is_two_w_plus_eta() {
    let terms = build_hamiltonian(&uncoupled()).unwrap();
    assert!((diag_ghz(&terms, [2, 0, 0]) - 9.919).abs() < 1e-12);
}

#[test]
fn uncoupled_spectrum_is_sum_of_mode_energies() {
    let spec = uncoupled();
    let terms = build_hamiltonian(&spec).unwrap();
    let e = |m: usize, n: usize| {
        let md = &spec.modes[m];
        n as f64 * md.frequency + 0.5 * md.anharmonicity * (n * n.saturating_sub(1)) as f64
    };
    let mut expect: Vec<f64> = (0..terms.dimension)
        .map(|i| {
            let l = index_label(terms.levels, i);
            e(0, l[0]) + e(1, l[1]) + e(2, l[2])
        })
        .collect();
    let eig = SymmetricEigen::new(terms.static_part.clone());
    let mut got: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|v| v / czsim_core::units::TWO_PI)
        .collect();
    expect.sort_by(f64::total_cmp);
    got.sort_by(f64::total_cmp);
    for (a, b) in expect.iter().zip(&got) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn hamiltonian_is_hermitian_with_expected_single_excitation_block() {
    let terms = build_hamiltonian(&DeviceSpec::default()).unwrap();
    let h = &terms.static_part;
    assert!((h - h.transpose()).abs().max() < 1e-12);
    let s = &terms.sectors[1];
    assert_eq!(s.dim(), 3);
    let b = s.hamiltonian([0.0; 3]) / czsim_core::units::TWO_PI;
    // sector order is ascending global index: |001>, |010>, |100>
    assert!((b[(0, 1)] - 0.09).abs() < 1e-12);
    assert!((b[(1, 2)] - 0.09).abs() < 1e-12);
    assert!((b[(0, 2)] - 0.006).abs() < 1e-12);
}

#[test]
fn dressed_basis_of_uncoupled_device_is_bare() {
    let terms = build_hamiltonian(&uncoupled()).unwrap();
    let basis = dressed_basis(&terms, [0.0; 3], None).unwrap();
    for st in &basis.states {
        assert!((st.overlap - 1.0).abs() < 1e-12);
        assert!((st.energy - diag_ghz(&terms, st.label)).abs() < 1e-9);
    }
}

#[test]
fn level_repulsion_is_bounded_at_zero_coupling() {
    let spec = DeviceSpec::default();
    let wz = zero_coupling_point(&spec).unwrap();
    let idle = spec.with_coupler_frequency(wz);
    let terms = build_hamiltonian(&idle).unwrap();
    let basis = dressed_basis(&terms, [0.0; 3], Some(2)).unwrap();
    for l in [[1, 0, 0], [0, 0, 1]] {
        let shift = basis.energy(l).unwrap() - diag_ghz(&terms, l);
        assert!(shift.abs() < 0.09, "{l:?}: {shift}");
    }
}

#[test]
fn labels_follow_overlap_when_qubits_swap() {
    let mut spec = DeviceSpec::default();
    spec.modes[0].frequency = 4.889;
    spec.modes[2].frequency = 5.077;
    let terms = build_hamiltonian(&spec).unwrap();
    let basis = dressed_basis(&terms, [0.0; 3], Some(1)).unwrap();
    // Q1 now lower: its dressed state must still carry the |100> label.
    let e1 = basis.energy([1, 0, 0]).unwrap();
    let e2 = basis.energy([0, 0, 1]).unwrap();
    assert!(e1 < e2);
    assert!((e1 - 4.889).abs() < 0.01);
}

#[test]
fn effective_coupling_without_coupler_is_direct() {
    let mut spec = DeviceSpec::default();
    spec.couplings.g_1c = 0.0;
    spec.couplings.g_2c = 0.0;
    assert_eq!(effective_coupling(&spec, 6.0).unwrap(), 0.006);
}

#[test]
fn effective_coupling_tends_to_direct_for_far_coupler() {
    let spec = DeviceSpec::default();
    // The coupler-mediated part falls off as g^2/detuning.
    let g20 = effective_coupling(&spec, 20.0).unwrap();
    assert!((g20 - perturbative_coupling(&spec, 20.0)).abs() < 1e-4);
    let far = effective_coupling(&spec, 2000.0).unwrap();
    assert!((far - 0.006).abs() < 1e-4, "{far}");
}

#[test]
fn single_zero_above_both_qubits() {
    let spec = DeviceSpec::default();
    let wz = zero_coupling_point(&spec).unwrap();
    assert!(wz > 5.077);
    assert!(effective_coupling(&spec, wz).unwrap().abs() < 1e-6);
    assert!((wz - 6.233).abs() < 2e-3, "{wz}");
    let (lo, hi) = coupler_branch(&spec);
    let n = 400;
    let mut changes = 0;
    let mut prev = effective_coupling(&spec, lo).unwrap();
    for k in 1..=n {
        let g = effective_coupling(&spec, lo + (hi - lo) * k as f64 / n as f64).unwrap();
        if g.signum() != prev.signum() {
            changes += 1;
        }
        prev = g;
    }
    assert_eq!(changes, 1);
}

#[test]
fn no_zero_without_direct_coupling() {
    let mut spec = DeviceSpec::default();
    spec.couplings.g_12 = 0.0;
    assert!(matches!(
        zero_coupling_point(&spec),
        Err(Error::NoSignChange { .. })
    ));
}

#[test]
fn stronger_direct_coupling_pulls_zero_toward_qubits() {
    // A larger g_12 needs a larger mediated term g^2/detuning to cancel it.
    let spec = DeviceSpec::default();
    let mut strong = spec.clone();
    strong.couplings.g_12 = 0.012;
    let (w0, w1) = (
        zero_coupling_point(&spec).unwrap(),
        zero_coupling_point(&strong).unwrap(),
    );
    assert!(w1 < w0 && w1 > 5.077, "{w0} {w1}");
}

#[test]
fn flux_curve_endpoints() {
    let m = FluxModel {
        max_frequency: 5.299,
        anharmonicity: -0.235,
    };
    assert!((flux_to_frequency(&m, 0.0).unwrap() - 5.299).abs() < 1e-12);
    let third = (5.299 + 0.235) * 0.5f64.sqrt() - 0.235;
    assert!((flux_to_frequency(&m, 1.0 / 3.0).unwrap() - third).abs() < 1e-12);
    assert!(flux_to_frequency(&m, 0.5).is_err());
}

#[test]
fn zero_point_stable_under_truncation() {
    let spec = DeviceSpec::default();
    let mut four = spec.clone();
    four.set_levels(4);
    let d = zero_coupling_point(&spec).unwrap() - zero_coupling_point(&four).unwrap();
    assert!(d.abs() < 1e-4);
}

#[test]
fn dimension_cap_is_enforced() {
    let mut spec = DeviceSpec::default();
    spec.set_levels(6);
    assert!(matches!(
        build_hamiltonian(&spec),
        Err(Error::DimensionOverflow { dimension: 216, .. })
    ));
}

proptest! {
    #[test]
    fn flux_curve_is_even_and_invertible(phi in -0.45f64..0.45) {
        let m = FluxModel { max_frequency: 5.211, anharmonicity: -0.235 };
        let a = flux_to_frequency(&m, phi).unwrap();
        prop_assert_eq!(a, flux_to_frequency(&m, -phi).unwrap());
        prop_assert!((frequency_to_flux(&m, a).unwrap() - phi.abs()).abs() < 1e-9);
    }

    #[test]
    fn label_index_round_trips(i in 0usize..27) {
        prop_assert_eq!(label_index([3, 3, 3], index_label([3, 3, 3], i)), i);
    }

    #[test]
    fn effective_coupling_is_monotone_on_branch(a in 5.2f64..6.9, b in 5.2f64..6.9) {
        let spec = DeviceSpec::default();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-3);
        prop_assert!(effective_coupling(&spec, lo).unwrap() < effective_coupling(&spec, hi).unwrap());
    }
}

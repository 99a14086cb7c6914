// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::OnceLock;

use czsim_core::calibration::*;
use czsim_core::device::DeviceSpec;
use czsim_core::gate::{calibrate, GateContext, GateSpec};
use czsim_core::metrics::{canonical_cz, project_computational};
use czsim_core::propagator::PropagatorOptions;
use czsim_core::pulse::{PulseFamily, PulseShapeSpec};
use czsim_core::units::wrap_pi;

struct Fixture {
    ctx: GateContext,
    gate: GateSpec,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let ctx = GateContext::new(&DeviceSpec::default()).unwrap();
        let mut g = GateSpec::new(
            PulseShapeSpec::coupling(PulseFamily::Slepian, 45.0, -0.0178),
            -0.05,
        );
        g.compensation = CompensationMode::Q2Only;
        let gate = calibrate(&ctx, &g).unwrap().gate;
        Fixture { ctx, gate }
    })
}

fn coupler_sweep() -> Vec<f64> {
    (0..=170).map(|k| 5.3 + 0.01 * k as f64).collect()
}

#[test]
fn uncompensated_shift_is_negative_and_grows_toward_qubits() {
    let f = fixture();
    let reference = dressed_qubit_frequencies(&f.ctx.spec, f.ctx.zero_point).unwrap();
    let shifts: Vec<f64> = coupler_sweep()
        .iter()
        .filter(|&&wc| wc < f.ctx.zero_point)
        .map(|&wc| dressed_qubit_frequencies(&f.ctx.spec, wc).unwrap()[0] - reference[0])
        .collect();
    assert!(shifts.iter().all(|&s| s < 0.0));
    assert!(shifts.windows(2).all(|w| w[0] < w[1]));
    let self_ref = dressed_qubit_frequencies(&f.ctx.spec, f.ctx.zero_point).unwrap();
    assert_eq!(self_ref, reference);
}

#[test]
fn compensation_flattens_dressed_frequencies() {
    let f = fixture();
    let spec = &f.ctx.spec;
    let wcs = coupler_sweep();
    let reference = dressed_qubit_frequencies(spec, f.ctx.zero_point).unwrap();
    let curve = compensation_curve(spec, f.ctx.zero_point, &wcs).unwrap();
    let (w1, w2) = spec.qubit_frequencies();
    for q in 0..2 {
        let raw: Vec<f64> = wcs
            .iter()
            .map(|&wc| dressed_qubit_frequencies(spec, wc).unwrap()[q])
            .collect();
        let span = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - raw.iter().cloned().fold(f64::INFINITY, f64::min);
        let fixed: Vec<f64> = curve
            .iter()
            .map(|&(wc, d1, d2)| {
                let mut s = spec.clone();
                s.modes[0].frequency = w1 + d1;
                s.modes[2].frequency = w2 + d2;
                dressed_qubit_frequencies(&s, wc).unwrap()[q] - reference[q]
            })
            .collect();
        let resid = fixed.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(resid < 0.01 * span, "qubit {q}: {resid} vs span {span}");
    }
}

#[test]
fn compensation_map_interpolates_offsets() {
    let f = fixture();
    let map = f.ctx.compensation(CompensationMode::Q2Only).unwrap();
    let (lo, hi) = map.domain();
    assert!(lo < 5.5 && hi > 6.9);
    let reference = dressed_qubit_frequencies(&f.ctx.spec, f.ctx.zero_point).unwrap();
    let d = compensation_offsets(&f.ctx.spec, 6.0, reference, CompensationMode::Q2Only).unwrap();
    let m = map.offsets(6.0).unwrap();
    assert!((d[1] - m[1]).abs() < 1e-7);
    assert!(map.offsets(lo - 0.5).is_err());
    assert!(map.offsets(f.ctx.zero_point).unwrap()[1].abs() < 1e-9);
}

#[test]
fn scan_has_a_cz_point_and_monotone_phase() {
    let f = fixture();
    let grid = ScanGrid {
        coupling_axis: ScanGrid::centred_axis(f.gate.pulse.peak_value, 0.0005, 5),
        detune_axis: ScanGrid::centred_axis(f.gate.q2_detune, 0.001, 5),
        gate_count_axis: vec![1],
    };
    let (leak, phase) = coupling_detune_scan(&f.ctx, &grid, &f.gate, &SequentialMap).unwrap();
    assert_eq!(leak.values.len(), 5);
    let good = leak
        .values
        .iter()
        .flatten()
        .zip(phase.values.iter().flatten())
        .any(|(&l, &p)| l < 1e-3 && (p - 180.0).abs() < 5.0);
    assert!(good);
    assert!((phase.values[2][2] - 180.0).abs() < 0.5);
    let row = &phase.values[2];
    let up = row.windows(2).all(|w| w[1] > w[0]);
    let down = row.windows(2).all(|w| w[1] < w[0]);
    assert!(up || down, "{row:?}");
}

#[test]
fn zero_peak_and_detune_do_nothing() {
    let f = fixture();
    let mut g = f.gate.clone();
    g.compensation = CompensationMode::Off;
    let grid = ScanGrid {
        coupling_axis: vec![0.0],
        detune_axis: vec![0.0],
        gate_count_axis: vec![1],
    };
    let (leak, phase) = coupling_detune_scan(&f.ctx, &grid, &g, &SequentialMap).unwrap();
    assert!(leak.values[0][0] < 1e-8);
    let p = phase.values[0][0];
    assert!(p.min(360.0 - p) < 1e-6, "{p}");
}

#[test]
fn zero_peak_column_with_detune_stays_small() {
    // Moving Q2 alone still brushes the 101-200 pair through the residual
    // static coupling, so this column is small but not zero.
    let f = fixture();
    let grid = ScanGrid {
        coupling_axis: vec![0.0],
        detune_axis: ScanGrid::centred_axis(f.gate.q2_detune, 0.002, 5),
        gate_count_axis: vec![1],
    };
    let (leak, phase) = coupling_detune_scan(&f.ctx, &grid, &f.gate, &SequentialMap).unwrap();
    for (l, p) in leak
        .values
        .iter()
        .flatten()
        .zip(phase.values.iter().flatten())
    {
        assert!(*l < 1e-2, "{l}");
        assert!(p.min(360.0 - p) < 5.0, "{p}");
    }
}

#[test]
fn repeated_gates_accumulate_injected_error_linearly() {
    let f = fixture();
    let n_list: Vec<u32> = (1..=10).collect();
    let values = vec![f.gate.pulse.peak_value];
    let (_, clean) = repeated_gate_scan(
        &f.ctx,
        &f.gate,
        &n_list,
        RepeatAxis::Coupling,
        &values,
        0.0,
        &SequentialMap,
    )
    .unwrap();
    assert!(clean.values[0][0].abs() < 0.5);
    let dphi = 0.3f64;
    let (leak, dev) = repeated_gate_scan(
        &f.ctx,
        &f.gate,
        &n_list,
        RepeatAxis::Coupling,
        &values,
        dphi.to_radians(),
        &SequentialMap,
    )
    .unwrap();
    for (k, &n) in n_list.iter().enumerate() {
        let expect = clean.values[k][0] + n as f64 * dphi;
        assert!(
            (dev.values[k][0] - expect).abs() < 0.1,
            "N={n}: {} vs {expect}",
            dev.values[k][0]
        );
        assert!(leak.values[k][0] <= (n * n) as f64 * leak.values[0][0] + 1e-12);
    }
}

#[test]
fn scan_grids_are_validated() {
    let bad = ScanGrid {
        coupling_axis: vec![0.0, 0.0],
        detune_axis: vec![0.0],
        gate_count_axis: vec![1],
    };
    assert!(bad.validate().is_err());
    let empty = ScanGrid {
        coupling_axis: vec![],
        detune_axis: vec![0.0],
        gate_count_axis: vec![1],
    };
    assert!(empty.validate().is_err());
    let zero = ScanGrid {
        coupling_axis: vec![0.0],
        detune_axis: vec![0.0],
        gate_count_axis: vec![0],
    };
    assert!(zero.validate().is_err());
}

#[test]
fn ramsey_reads_conditional_phase() {
    let id = czsim_core::linalg::CMatrix::identity(4, 4);
    let (p, s) = ramsey_conditional_phase(&id, &RamseyOptions::default()).unwrap();
    assert!(p.abs() < 1e-12 && s == 0.0);
    let opts = RamseyOptions {
        shots: Some(2000),
        seed: 7,
        ..Default::default()
    };
    let (p, s) = ramsey_conditional_phase(&canonical_cz(), &opts).unwrap();
    assert!(
        wrap_pi(p - std::f64::consts::PI).abs() <= 3.0 * s,
        "{p} +- {s}"
    );
}

#[test]
fn ramsey_agrees_with_unitary_phase() {
    let f = fixture();
    let r = f
        .ctx
        .propagate(&f.gate, &PropagatorOptions::computational())
        .unwrap();
    let m = project_computational(&r).unwrap();
    let exact = czsim_core::metrics::conditional_phase(&m).unwrap();
    let opts = RamseyOptions {
        shots: Some(10_000),
        seed: 3,
        ..Default::default()
    };
    let (p, _) = ramsey_conditional_phase(&m, &opts).unwrap();
    assert!(wrap_pi(p - exact).abs().to_degrees() < 1.0);
}

#[test]
fn ramsey_rejects_thin_data() {
    let opts = RamseyOptions {
        shots: Some(50),
        ..Default::default()
    };
    assert!(ramsey_conditional_phase(&canonical_cz(), &opts).is_err());
}

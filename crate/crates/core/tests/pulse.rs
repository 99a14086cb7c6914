// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use czsim_core::device::{effective_coupling, zero_coupling_point, DeviceSpec};
use czsim_core::pulse::*;
use proptest::prelude::*;

fn idle_device() -> (DeviceSpec, f64) {
    let spec = DeviceSpec::default();
    let wz = zero_coupling_point(&spec).unwrap();
    (spec.with_coupler_frequency(wz), wz)
}

#[test]
fn cosine_peaks_mid_pulse_and_idles_at_ends() {
    let mut s = PulseShapeSpec::coupling(PulseFamily::Cosine, 40.0, -0.02);
    s.idle_value = 0.001;
    let w = sample_pulse(&s, 0.05).unwrap();
    let n = w.samples.len() - 1;
    assert_eq!(n, 800);
    assert!((w.samples[n / 2] - (-0.02)).abs() < 1e-15);
    assert!((w.samples[0] - 0.001).abs() < 1e-15);
    assert!((w.samples[n] - 0.001).abs() < 1e-15);
}

#[test]
fn square_spans_its_length() {
    let w = sample_pulse(
        &PulseShapeSpec::coupling(PulseFamily::Square, 25.0, -0.014),
        0.05,
    )
    .unwrap();
    assert!((w.duration() - 25.0).abs() < 1e-12);
    assert_eq!(
        w.samples.iter().filter(|&&v| v == -0.014).count(),
        w.samples.len() - 2
    );
}

#[test]
fn slepian_is_symmetric_and_reaches_peak() {
    let w = sample_pulse(
        &PulseShapeSpec::coupling(PulseFamily::Slepian, 45.0, -0.018),
        0.05,
    )
    .unwrap();
    let n = w.samples.len() - 1;
    for k in 0..=n {
        assert!((w.samples[k] - w.samples[n - k]).abs() < 1e-15);
    }
    assert!((w.samples[n / 2] - (-0.018)).abs() < 1e-15);
}

#[test]
fn bad_pulses_are_rejected() {
    assert!(sample_pulse(
        &PulseShapeSpec::coupling(PulseFamily::Cosine, 0.0, -0.02),
        0.05
    )
    .is_err());
    let mut s = PulseShapeSpec::coupling(PulseFamily::Slepian, 40.0, -0.02);
    s.slepian_coefficients = vec![1.0, -1.0];
    assert!(sample_pulse(&s, 0.05).is_err());
    assert!(PulseFamily::parse("gaussian").is_err());
    assert_eq!(PulseFamily::parse("cosine").unwrap(), PulseFamily::Cosine);
}

#[test]
fn constant_coupling_maps_to_constant_frequency() {
    let (idle, wz) = idle_device();
    let map = CouplingMap::build(&idle, CouplingMap::DEFAULT_POINTS).unwrap();
    let wc = 6.0;
    let g = effective_coupling(&idle, wc).unwrap();
    let w = SampledWaveform::constant(0.5, 10, g, Parameterization::EffectiveCoupling);
    let f = coupling_to_frequency(&map, &w).unwrap();
    assert!(f.samples.iter().all(|&v| (v - wc).abs() < 1e-6));
    let z = SampledWaveform::constant(0.5, 3, 0.0, Parameterization::EffectiveCoupling);
    let fz = coupling_to_frequency(&map, &z).unwrap();
    assert!(fz.samples.iter().all(|&v| (v - wz).abs() < 1e-6));
}

#[test]
fn frequency_coupling_round_trip_on_slepian() {
    let (idle, _) = idle_device();
    let map = CouplingMap::build(&idle, CouplingMap::DEFAULT_POINTS).unwrap();
    let g = sample_pulse(
        &PulseShapeSpec::coupling(PulseFamily::Slepian, 45.0, -0.018),
        0.1,
    )
    .unwrap();
    let f = coupling_to_frequency(&map, &g).unwrap();
    let back = frequency_to_coupling(&idle, &f).unwrap();
    let again = coupling_to_frequency(&map, &back).unwrap();
    for (a, b) in f.samples.iter().zip(&again.samples) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn out_of_range_coupling_is_reported() {
    let (idle, _) = idle_device();
    let map = CouplingMap::build(&idle, 801).unwrap();
    let (lo, _) = map.coupling_range();
    let w = sample_pulse(
        &PulseShapeSpec::coupling(PulseFamily::Cosine, 20.0, 2.0 * lo),
        0.5,
    )
    .unwrap();
    assert!(matches!(
        coupling_to_frequency(&map, &w),
        Err(czsim_core::Error::OutOfRange { .. })
    ));
}

proptest! {
    #[test]
    fn envelope_stays_in_unit_interval(fam in 0usize..3, len in 5.0f64..120.0, l1 in -0.2f64..0.5) {
        let family = [PulseFamily::Square, PulseFamily::Slepian, PulseFamily::Cosine][fam];
        let mut s = PulseShapeSpec::coupling(family, len, -0.02);
        s.slepian_coefficients = vec![1.0, l1];
        let e = envelope(&s, 0.05).unwrap();
        prop_assert_eq!(e[0], 0.0);
        prop_assert!(e[e.len() - 1].abs() < 1e-12);
        for v in e {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn step_count_rounds_to_nearest_step(len in 1.0f64..200.0, frac in 0.001f64..0.05) {
        let dt = frac * len;
        let n = step_count(len, dt).unwrap();
        prop_assert!((n as f64 * dt - len).abs() <= 0.5 * dt + 1e-12);
    }
}

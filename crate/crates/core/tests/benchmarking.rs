// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use czsim_core::benchmarking::*;
use proptest::prelude::*;

#[test]
fn circuits_are_deterministic_and_shaped() {
    let a = generate_circuit(2, 12, 99, true).unwrap();
    let b = generate_circuit(2, 12, 99, true).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, generate_circuit(2, 12, 100, true).unwrap());
    assert_eq!(a.layers.len(), 12);
    assert!(a.layers.iter().all(|l| l.len() == 2));
    for q in 0..2 {
        assert!(a.layers.windows(2).all(|w| w[0][q] != w[1][q]));
    }
    assert!(generate_circuit(3, 4, 0, false).is_err());
    assert!(generate_circuit(1, 4, 0, true).is_err());
    assert!(generate_circuit(2, 0, 0, true).is_err());
}

#[test]
fn gate_labels_are_uniform() {
    let mut counts = [0usize; 4];
    let mut total = 0usize;
    for s in 0..500u64 {
        let c = generate_circuit(1, 20, split_seed(5, s), false).unwrap();
        for l in &c.layers {
            let k = HalfPi::ALL.iter().position(|&g| g == l[0]).unwrap();
            counts[k] += 1;
            total += 1;
        }
    }
    let expect = total as f64 / 4.0;
    let sigma = (total as f64 * 0.25 * 0.75).sqrt();
    for c in counts {
        assert!((c as f64 - expect).abs() < 5.0 * sigma, "{counts:?}");
    }
}

#[test]
fn noiseless_simulation_matches_ideal() {
    let c = generate_circuit(2, 8, 3, true).unwrap();
    for mode in [SimulationMode::Density, SimulationMode::Statevector] {
        let p = simulate_circuit(&c, &NoiseSpec::default(), mode, &Entangler::Ideal).unwrap();
        assert!((p.ideal.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (a, b) in p.ideal.iter().zip(&p.noisy) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn full_depolarizing_gives_uniform_then_confusion() {
    let c = generate_circuit(1, 5, 3, false).unwrap();
    let p = simulate_circuit(
        &c,
        &NoiseSpec::global(1.0),
        SimulationMode::Density,
        &Entangler::Ideal,
    )
    .unwrap();
    assert!(p.noisy.iter().all(|&x| (x - 0.5).abs() < 1e-12));
    let noise = NoiseSpec {
        depolarizing_per_cycle: 1.0,
        readout: vec![Confusion {
            f00: 1.0,
            f11: 0.966,
        }],
        ..Default::default()
    };
    let p = simulate_circuit(&c, &noise, SimulationMode::Density, &Entangler::Ideal).unwrap();
    assert!((p.noisy[1] - 0.5 * 0.966).abs() < 1e-12);
}

#[test]
fn confusion_on_a_prepared_one() {
    let out = apply_confusion(
        &[0.0, 1.0],
        &[Confusion {
            f00: 0.99,
            f11: 0.966,
        }],
    );
    assert!((out[1] - 0.966).abs() < 1e-15);
    assert!((out[0] - 0.034).abs() < 1e-15);
    assert!(invert_confusion(&out, &[Confusion { f00: 0.5, f11: 0.5 }]).is_err());
}

#[test]
fn xeb_reference_values() {
    let ideal = [0.5, 0.3, 0.15, 0.05];
    assert!((linear_xeb_fidelity(&ideal, &ideal).unwrap() - 1.0).abs() < 1e-12);
    assert!(linear_xeb_fidelity(&ideal, &[0.25; 4]).unwrap().abs() < 1e-12);
    assert!(linear_xeb_fidelity(&[0.25; 4], &ideal).is_err());
}

#[test]
fn decay_fit_recovers_alpha() {
    let d: Vec<f64> = [1.0, 3.0, 5.0, 8.0, 12.0, 17.0, 23.0, 30.0].to_vec();
    let f: Vec<f64> = d.iter().map(|&x| 0.99f64.powf(x)).collect();
    let fit = fit_decay(&d, &f, 4).unwrap();
    assert!((fit.alpha - 0.99).abs() < 1e-9);
    assert!((fit.amplitude - 1.0).abs() < 1e-9);
}

#[test]
fn xeb_recovers_global_depolarizing() {
    let mut cfg = XebConfig::new(2);
    cfg.noise = NoiseSpec::global(0.01);
    let run = cz_xeb_pipeline(&cfg).unwrap();
    assert!((run.fit.alpha - 0.99).abs() < 0.002, "{}", run.fit.alpha);
}

#[test]
fn speckle_purity_tracks_oracle() {
    for p in [0.0, 0.0031, 0.02] {
        let mut cfg = XebConfig::new(2);
        cfg.noise = NoiseSpec::global(p);
        cfg.depths = vec![5, 10, 20];
        let run = cz_xeb_pipeline(&cfg).unwrap();
        for e in &run.estimates {
            let oracle = depolarized_purity(p, e.depth);
            assert!(
                (e.purity - oracle).abs() < 0.005,
                "p={p} d={}: {} vs {oracle}",
                e.depth,
                e.purity
            );
        }
    }
}

#[test]
fn fully_mixed_output_has_zero_purity() {
    let ideal: Vec<Vec<f64>> = (0..20)
        .map(|s| {
            simulate_circuit(
                &generate_circuit(2, 6, s, true).unwrap(),
                &NoiseSpec::default(),
                SimulationMode::Density,
                &Entangler::Ideal,
            )
            .unwrap()
            .ideal
        })
        .collect();
    let mixed = vec![vec![0.25; 4]; 20];
    let est = speckle_purity(&mixed, &ideal, None).unwrap();
    assert!(est.purity.abs() < 1e-12);
    assert!(speckle_purity(&mixed[..5], &ideal[..5], None).is_err());
}

#[test]
fn split_seed_is_stable() {
    assert_eq!(split_seed(7, 3), split_seed(7, 3));
    assert_ne!(split_seed(7, 3), split_seed(7, 4));
    assert_ne!(split_seed(7, 3), split_seed(8, 3));
}

proptest! {
    #[test]
    fn confusion_round_trips(f00 in 0.6f64..1.0, f11 in 0.6f64..1.0, g00 in 0.6f64..1.0, g11 in 0.6f64..1.0,
                             raw in prop::collection::vec(0.0f64..1.0, 4)) {
        let s: f64 = raw.iter().sum::<f64>() + 1e-9;
        let p: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let conf = [Confusion { f00, f11 }, Confusion { f00: g00, f11: g11 }];
        let back = invert_confusion(&apply_confusion(&p, &conf), &conf).unwrap();
        for (a, b) in p.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn confusion_preserves_total(f00 in 0.0f64..1.0, f11 in 0.0f64..1.0, a in 0.0f64..1.0) {
        let out = apply_confusion(&[a, 1.0 - a], &[Confusion { f00, f11 }]);
        prop_assert!((out[0] + out[1] - 1.0).abs() < 1e-12);
    }
}

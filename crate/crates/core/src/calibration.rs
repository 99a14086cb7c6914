// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Calibration experiments in simulation: frequency-shift compensation,
//! 2-D leakage and conditional-phase scans, repeated-gate amplification and
//! a shot-sampled Ramsey measurement of the conditional phase.

use alloc::vec::Vec;
use nalgebra::{Matrix2, SymmetricEigen, Vector2};
#[allow(unused_imports)] // std supplies these inherently under test
use num_traits::Float;

use crate::device::{single_excitation_block, DeviceSpec};
use crate::linalg::Pchip;
use crate::{Error, Result};

mod ramsey;
mod scans;

pub use ramsey::{ramsey_conditional_phase, ramsey_phase, RamseyFit, RamseyOptions};
pub use scans::{
    coupling_detune_scan, leakage_scan, phase_scan, repeated_gate_scan, GridMap, RepeatAxis,
    ScanAxis, ScanGrid, ScanKind, ScanResult, SequentialMap,
};

/// Dressed 0->1 frequencies (Q1, Q2) from the single-excitation block,
/// with the overlap of each eigenvector on its own bare state.
fn dressed_qubits(
    w1: f64,
    wc: f64,
    w2: f64,
    spec: &DeviceSpec,
) -> ([f64; 2], [nalgebra::Vector3<f64>; 2], [f64; 2]) {
    let eig = SymmetricEigen::new(single_excitation_block(w1, wc, w2, &spec.couplings));
    let pick = |row: usize| {
        (0..3)
            .max_by(|&a, &b| {
                let (x, y) = (
                    eig.eigenvectors[(row, a)].powi(2),
                    eig.eigenvectors[(row, b)].powi(2),
                );
                x.total_cmp(&y).then(b.cmp(&a))
            })
            .unwrap()
    };
    let (k1, k2) = (pick(0), pick(2));
    let v1 = eig.eigenvectors.column(k1).into_owned();
    let v2 = eig.eigenvectors.column(k2).into_owned();
    (
        [eig.eigenvalues[k1], eig.eigenvalues[k2]],
        [v1, v2],
        [v1[0] * v1[0], v2[2] * v2[2]],
    )
}

/// Dressed qubit frequencies (GHz) at a coupler frequency without compensation.
pub fn dressed_qubit_frequencies(spec: &DeviceSpec, wc: f64) -> Result<[f64; 2]> {
    let (w1, w2) = spec.qubit_frequencies();
    let (e, _, ov) = dressed_qubits(w1, wc, w2, spec);
    if ov[0] <= 0.5 || ov[1] <= 0.5 {
        return Err(Error::AmbiguousLabel {
            label: if ov[0] <= 0.5 { [1, 0, 0] } else { [0, 0, 1] },
            overlap: ov[0].min(ov[1]),
        });
    }
    Ok(e)
}

/// Which qubits receive bare-frequency corrections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CompensationMode {
    #[default]
    Off,
    Q2Only,
    Both,
}

/// Newton solve for bare offsets restoring the dressed qubit frequencies to
/// `reference` (GHz). Derivatives come from Hellmann-Feynman: dE_k/dw_j = v_kj^2.
pub fn compensation_offsets(
    spec: &DeviceSpec,
    wc: f64,
    reference: [f64; 2],
    mode: CompensationMode,
) -> Result<[f64; 2]> {
    let (w1, w2) = spec.qubit_frequencies();
    let mut d = [0.0f64, 0.0];
    if mode == CompensationMode::Off {
        return Ok(d);
    }
    for _ in 0..60 {
        let (e, v, ov) = dressed_qubits(w1 + d[0], wc, w2 + d[1], spec);
        if ov[0] <= 0.5 || ov[1] <= 0.5 {
            return Err(Error::NoConvergence(alloc::format!(
                "dressed qubit labels lost at w_c = {wc} GHz"
            )));
        }
        let r = [e[0] - reference[0], e[1] - reference[1]];
        let done = match mode {
            CompensationMode::Both => r[0].abs().max(r[1].abs()) < 1e-12,
            _ => r[1].abs() < 1e-12,
        };
        if done {
            return Ok(d);
        }
        match mode {
            CompensationMode::Both => {
                let j = Matrix2::new(
                    v[0][0].powi(2),
                    v[0][2].powi(2),
                    v[1][0].powi(2),
                    v[1][2].powi(2),
                );
                let step = j.lu().solve(&Vector2::new(r[0], r[1])).ok_or_else(|| {
                    Error::NoConvergence(alloc::format!(
                        "singular compensation Jacobian at w_c = {wc} GHz"
                    ))
                })?;
                d[0] -= step[0];
                d[1] -= step[1];
            }
            _ => d[1] -= r[1] / v[1][2].powi(2),
        }
        if !(d[0].is_finite() && d[1].is_finite()) || d[0].abs() > 1.0 || d[1].abs() > 1.0 {
            break;
        }
    }
    Err(Error::NoConvergence(alloc::format!(
        "compensation at w_c = {wc} GHz"
    )))
}

/// (w_c, dw_1, dw_2) with every dressed qubit frequency pinned to its value at `reference_wc`.
pub fn compensation_curve(
    spec: &DeviceSpec,
    reference_wc: f64,
    coupler_frequencies: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    let reference = dressed_qubit_frequencies(spec, reference_wc)?;
    coupler_frequencies
        .iter()
        .map(|&wc| {
            spec_guard(spec, wc)?;
            let d = compensation_offsets(spec, wc, reference, CompensationMode::Both)?;
            Ok((wc, d[0], d[1]))
        })
        .collect()
}

fn spec_guard(spec: &DeviceSpec, wc: f64) -> Result<()> {
    let (w1, w2) = spec.qubit_frequencies();
    for q in [w1, w2] {
        if (q - wc).abs() < spec.resonance_guard {
            return Err(Error::CouplerResonant {
                coupler: wc,
                qubit: q,
            });
        }
    }
    Ok(())
}

/// Tabulated compensation offsets against coupler frequency.
#[derive(Debug, Clone)]
pub struct CompensationMap {
    pub mode: CompensationMode,
    domain: (f64, f64),
    d1: Option<Pchip>,
    d2: Option<Pchip>,
}

impl CompensationMap {
    /// Table from `hi` downward; the domain ends at the first coupler
    /// frequency where the compensated labels can no longer be followed.
    pub fn build(
        spec: &DeviceSpec,
        reference_wc: f64,
        mode: CompensationMode,
        lo: f64,
        hi: f64,
        points: usize,
    ) -> Result<Self> {
        if mode == CompensationMode::Off {
            return Ok(CompensationMap {
                mode,
                domain: (f64::NEG_INFINITY, f64::INFINITY),
                d1: None,
                d2: None,
            });
        }
        let reference = dressed_qubit_frequencies(spec, reference_wc)?;
        let h = (hi - lo) / (points - 1) as f64;
        let mut wcs = Vec::new();
        let mut d1 = Vec::new();
        let mut d2 = Vec::new();
        for k in (0..points).rev() {
            let wc = lo + h * k as f64;
            match spec_guard(spec, wc).and_then(|_| compensation_offsets(spec, wc, reference, mode))
            {
                Ok(d) => {
                    wcs.push(wc);
                    d1.push(d[0]);
                    d2.push(d[1]);
                }
                Err(_) => break,
            }
        }
        if wcs.len() < 4 {
            return Err(Error::NoConvergence("compensation table is empty".into()));
        }
        wcs.reverse();
        d1.reverse();
        d2.reverse();
        let domain = (wcs[0], wcs[wcs.len() - 1]);
        Ok(CompensationMap {
            mode,
            domain,
            d1: Some(Pchip::new(wcs.clone(), d1)),
            d2: Some(Pchip::new(wcs, d2)),
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Offsets (dw_1, dw_2) at a coupler frequency.
    pub fn offsets(&self, wc: f64) -> Result<[f64; 2]> {
        if self.mode == CompensationMode::Off {
            return Ok([0.0, 0.0]);
        }
        if wc < self.domain.0 - 1e-12 || wc > self.domain.1 + 1e-12 {
            return Err(Error::OutOfRange {
                index: 0,
                value: wc,
                min: self.domain.0,
                max: self.domain.1,
            });
        }
        let d1 = if self.mode == CompensationMode::Both {
            self.d1.as_ref().map_or(0.0, |p| p.eval(wc))
        } else {
            0.0
        };
        Ok([d1, self.d2.as_ref().map_or(0.0, |p| p.eval(wc))])
    }
}

// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Coupler control waveforms: square, Slepian-like and cosine envelopes, and
//! conversion between effective-coupling and coupler-frequency samples.
//!
//! Samples sit on t_n = n dt for n = 0..=N with N dt = length, so both end
//! samples are the idle value and the schedule lasts (samples - 1) dt.

use alloc::vec::Vec;
#[allow(unused_imports)] // std supplies these inherently under test
use num_traits::Float;

use crate::device::{coupler_branch, effective_coupling, DeviceSpec};
use crate::linalg::Pchip;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PulseFamily {
    Square,
    Slepian,
    Cosine,
}

impl PulseFamily {
    pub fn name(self) -> &'static str {
        match self {
            PulseFamily::Square => "square",
            PulseFamily::Slepian => "slepian",
            PulseFamily::Cosine => "cosine",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(PulseFamily::Square),
            "slepian" => Ok(PulseFamily::Slepian),
            "cosine" => Ok(PulseFamily::Cosine),
            other => Err(Error::InvalidInput(alloc::format!(
                "unknown pulse family '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Parameterization {
    CouplerFrequency,
    EffectiveCoupling,
}

impl Parameterization {
    pub fn name(self) -> &'static str {
        match self {
            Parameterization::CouplerFrequency => "coupler_frequency",
            Parameterization::EffectiveCoupling => "effective_coupling",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PulseShapeSpec {
    pub family: PulseFamily,
    /// ns.
    pub length: f64,
    /// GHz, in the units of `parameterization`.
    pub idle_value: f64,
    pub peak_value: f64,
    pub parameterization: Parameterization,
    /// Fourier weights of the Slepian ramp rate; ignored by other families.
    pub slepian_coefficients: Vec<f64>,
}

impl PulseShapeSpec {
    /// Pulse in the effective-coupling parameterisation idling at g = 0.
    pub fn coupling(family: PulseFamily, length: f64, peak: f64) -> Self {
        PulseShapeSpec {
            family,
            length,
            idle_value: 0.0,
            peak_value: peak,
            parameterization: Parameterization::EffectiveCoupling,
            slepian_coefficients: alloc::vec![1.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::InvalidInput("pulse length must be > 0".into()));
        }
        if !(self.idle_value.is_finite() && self.peak_value.is_finite()) {
            return Err(Error::InvalidInput("pulse values must be finite".into()));
        }
        if self.family == PulseFamily::Slepian {
            let s: f64 = self.slepian_coefficients.iter().sum();
            if self.slepian_coefficients.is_empty() || !s.is_finite() || s.abs() < 1e-12 {
                return Err(Error::InvalidInput(
                    "slepian coefficients must have a nonzero sum".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampledWaveform {
    /// ns.
    pub dt: f64,
    /// GHz.
    pub samples: Vec<f64>,
    pub parameterization: Parameterization,
}

impl SampledWaveform {
    pub fn duration(&self) -> f64 {
        self.samples.len().saturating_sub(1) as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |n| n as f64 * self.dt)
    }

    pub fn constant(
        dt: f64,
        n_samples: usize,
        value: f64,
        parameterization: Parameterization,
    ) -> Self {
        SampledWaveform {
            dt,
            samples: alloc::vec![value; n_samples],
            parameterization,
        }
    }
}

/// Number of dt intervals covering `length`.
pub fn step_count(length: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput("dt must be > 0".into()));
    }
    if dt > length / 20.0 {
        return Err(Error::DtTooCoarse {
            dt,
            max: length / 20.0,
        });
    }
    Ok((length / dt).round() as usize)
}

/// Slepian rising edge on u in [0, 1]: sum_k l_k (u - sin(2 pi k u)/(2 pi k)) / sum_k l_k.
pub fn slepian_ramp(coefficients: &[f64], u: f64) -> f64 {
    let tau = 2.0 * core::f64::consts::PI;
    let norm: f64 = coefficients.iter().sum();
    let acc: f64 = coefficients
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let kk = (k + 1) as f64;
            l * (u - (tau * kk * u).sin() / (tau * kk))
        })
        .sum();
    acc / norm
}

/// Unit envelope e(t) in [0, 1] (for positive weights) on the sample grid.
pub fn envelope(spec: &PulseShapeSpec, dt: f64) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = step_count(spec.length, dt)?;
    let total = n as f64 * dt;
    let tau = 2.0 * core::f64::consts::PI;
    let env = (0..=n)
        .map(|k| {
            let t = k as f64 * dt;
            match spec.family {
                PulseFamily::Square => {
                    if k == 0 || k == n {
                        0.0
                    } else {
                        1.0
                    }
                }
                PulseFamily::Cosine => 0.5 * (1.0 - (tau * t / total).cos()),
                PulseFamily::Slepian => {
                    if k == 0 || k == n {
                        return 0.0;
                    }
                    let u = if 2 * k <= n {
                        2.0 * t / total
                    } else {
                        2.0 * (total - t) / total
                    };
                    slepian_ramp(&spec.slepian_coefficients, u)
                }
            }
        })
        .collect();
    Ok(env)
}

pub fn sample_pulse(spec: &PulseShapeSpec, dt: f64) -> Result<SampledWaveform> {
    let env = envelope(spec, dt)?;
    let span = spec.peak_value - spec.idle_value;
    let samples = env.iter().map(|e| spec.idle_value + span * e).collect();
    Ok(SampledWaveform {
        dt,
        samples,
        parameterization: spec.parameterization,
    })
}

/// Dense table of g_eff against coupler frequency on the branch above both
/// qubits, with monotone cubic interpolation in both directions.
#[derive(Debug, Clone)]
pub struct CouplingMap {
    forward: Pchip,
    inverse: Pchip,
    g_range: (f64, f64),
    wc_range: (f64, f64),
}

impl CouplingMap {
    pub const DEFAULT_POINTS: usize = 4001;

    pub fn build(spec: &DeviceSpec, points: usize) -> Result<Self> {
        spec.validate()?;
        let (lo, hi) = coupler_branch(spec);
        if !(hi > lo) || points < 4 {
            return Err(Error::InvalidInput("empty coupler branch".into()));
        }
        let h = (hi - lo) / (points - 1) as f64;
        let wcs: Vec<f64> = (0..points).map(|k| lo + h * k as f64).collect();
        let gs = wcs
            .iter()
            .map(|&w| effective_coupling(spec, w))
            .collect::<Result<Vec<f64>>>()?;
        if gs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "g_eff is not monotone on the coupler branch".into(),
            ));
        }
        let g_range = (gs[0], gs[points - 1]);
        Ok(CouplingMap {
            forward: Pchip::uniform(lo, h, gs.clone()),
            inverse: Pchip::new(gs, wcs),
            g_range,
            wc_range: (lo, hi),
        })
    }

    /// Attainable g_eff interval.
    pub fn coupling_range(&self) -> (f64, f64) {
        self.g_range
    }

    pub fn frequency_range(&self) -> (f64, f64) {
        self.wc_range
    }

    pub fn coupling(&self, wc: f64) -> f64 {
        self.forward.eval(wc)
    }

    pub fn frequency(&self, g: f64) -> Option<f64> {
        if g < self.g_range.0 || g > self.g_range.1 {
            return None;
        }
        Some(self.inverse.eval(g))
    }
}

/// Convert effective-coupling samples into coupler frequencies.
pub fn coupling_to_frequency(
    map: &CouplingMap,
    waveform: &SampledWaveform,
) -> Result<SampledWaveform> {
    if waveform.parameterization != Parameterization::EffectiveCoupling {
        return Err(Error::InvalidInput(
            "waveform is not in the effective-coupling parameterization".into(),
        ));
    }
    let (min, max) = map.coupling_range();
    let samples = waveform
        .samples
        .iter()
        .enumerate()
        .map(|(index, &g)| {
            map.frequency(g).ok_or(Error::OutOfRange {
                index,
                value: g,
                min,
                max,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SampledWaveform {
        dt: waveform.dt,
        samples,
        parameterization: Parameterization::CouplerFrequency,
    })
}

/// Convert coupler-frequency samples into g_eff by exact diagonalisation.
pub fn frequency_to_coupling(
    spec: &DeviceSpec,
    waveform: &SampledWaveform,
) -> Result<SampledWaveform> {
    if waveform.parameterization != Parameterization::CouplerFrequency {
        return Err(Error::InvalidInput(
            "waveform is not in the coupler-frequency parameterization".into(),
        ));
    }
    let samples = waveform
        .samples
        .iter()
        .map(|&w| effective_coupling(spec, w))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SampledWaveform {
        dt: waveform.dt,
        samples,
        parameterization: Parameterization::EffectiveCoupling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slepian_ramp_hits_ends() {
        for c in [
            alloc::vec![1.0],
            alloc::vec![1.0, 0.3],
            alloc::vec![0.5, -0.1, 0.2],
        ] {
            assert!(slepian_ramp(&c, 0.0).abs() < 1e-15);
            assert!((slepian_ramp(&c, 1.0) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn square_has_idle_ends() {
        let s = PulseShapeSpec::coupling(PulseFamily::Square, 25.0, -0.02);
        let w = sample_pulse(&s, 0.05).unwrap();
        assert_eq!(w.samples.len(), 501);
        assert_eq!(w.samples[0], 0.0);
        assert_eq!(w.samples[500], 0.0);
        assert!(w.samples[1..500].iter().all(|&v| v == -0.02));
        assert!((w.duration() - 25.0).abs() < 1e-12);
    }
}

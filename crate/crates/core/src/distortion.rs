// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Control-line step-response distortion and its exact recursive inverse.
//!
//! Step response s(t) = gain (1 + sum_k a_k exp(-t / tau_k)). Each pole is
//! mapped to z_k = exp(-dt / tau_k), which is exact for piecewise-constant
//! input. The waveform baseline is zero; use the `_about` variants to filter
//! a deviation from an idle level.

use alloc::vec::Vec;
#[allow(unused_imports)] // std supplies these inherently under test
use num_traits::Float;

use crate::pulse::SampledWaveform;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SettlingTerm {
    pub amplitude: f64,
    /// ns.
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistortionModel {
    pub settling_terms: Vec<SettlingTerm>,
    pub gain: f64,
}

impl Default for DistortionModel {
    fn default() -> Self {
        DistortionModel {
            settling_terms: Vec::new(),
            gain: 1.0,
        }
    }
}

impl DistortionModel {
    pub fn single(amplitude: f64, tau: f64) -> Self {
        DistortionModel {
            settling_terms: alloc::vec![SettlingTerm { amplitude, tau }],
            gain: 1.0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.gain == 1.0 && self.settling_terms.iter().all(|t| t.amplitude == 0.0)
    }

    /// 1 + sum a_k.
    pub fn instant_response(&self) -> f64 {
        1.0 + self.settling_terms.iter().map(|t| t.amplitude).sum::<f64>()
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.settling_terms {
            if !(t.tau > 0.0 && t.tau.is_finite() && t.amplitude.is_finite()) {
                return Err(Error::InvalidInput(
                    "settling terms need tau > 0 and finite amplitude".into(),
                ));
            }
        }
        if !self.gain.is_finite() {
            return Err(Error::InvalidInput("gain must be finite".into()));
        }
        Ok(())
    }

    fn check_invertible(&self) -> Result<()> {
        self.validate()?;
        if self.gain.abs() < 1e-12 || self.instant_response().abs() < 1e-12 {
            return Err(Error::NonInvertible);
        }
        Ok(())
    }

    fn poles(&self, dt: f64) -> Vec<(f64, f64)> {
        self.settling_terms
            .iter()
            .map(|t| (t.amplitude, (-dt / t.tau).exp()))
            .collect()
    }
}

/// Filter samples (baseline zero before the first sample).
pub fn apply_distortion(model: &DistortionModel, waveform: &SampledWaveform) -> SampledWaveform {
    if model.is_identity() {
        return waveform.clone();
    }
    let poles = model.poles(waveform.dt);
    let mut state = alloc::vec![0.0; poles.len()];
    let mut prev = 0.0;
    let samples = waveform
        .samples
        .iter()
        .map(|&x| {
            let mut acc = x;
            for ((a, z), e) in poles.iter().zip(state.iter_mut()) {
                *e = z * *e + (x - prev);
                acc += a * *e;
            }
            prev = x;
            model.gain * acc
        })
        .collect();
    SampledWaveform {
        samples,
        ..waveform.clone()
    }
}

/// Input that the filter maps onto `ideal`.
pub fn predistort(model: &DistortionModel, ideal: &SampledWaveform) -> Result<SampledWaveform> {
    model.check_invertible()?;
    if model.is_identity() {
        return Ok(ideal.clone());
    }
    let poles = model.poles(ideal.dt);
    let dc = model.instant_response();
    let mut state = alloc::vec![0.0; poles.len()];
    let mut prev = 0.0;
    let samples = ideal
        .samples
        .iter()
        .map(|&y| {
            let mut rhs = y / model.gain;
            for ((a, z), e) in poles.iter().zip(state.iter()) {
                rhs -= a * (z * e - prev);
            }
            let x = rhs / dc;
            for ((_, z), e) in poles.iter().zip(state.iter_mut()) {
                *e = z * *e + (x - prev);
            }
            prev = x;
            x
        })
        .collect();
    Ok(SampledWaveform {
        samples,
        ..ideal.clone()
    })
}

fn shifted(waveform: &SampledWaveform, by: f64) -> SampledWaveform {
    SampledWaveform {
        samples: waveform.samples.iter().map(|v| v + by).collect(),
        ..waveform.clone()
    }
}

/// Distort the deviation of `waveform` from `baseline`.
pub fn apply_distortion_about(
    model: &DistortionModel,
    waveform: &SampledWaveform,
    baseline: f64,
) -> SampledWaveform {
    shifted(
        &apply_distortion(model, &shifted(waveform, -baseline)),
        baseline,
    )
}

pub fn predistort_about(
    model: &DistortionModel,
    ideal: &SampledWaveform,
    baseline: f64,
) -> Result<SampledWaveform> {
    Ok(shifted(
        &predistort(model, &shifted(ideal, -baseline))?,
        baseline,
    ))
}

// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Gate pipeline: pulse -> coupler trajectory (with optional line distortion
//! and compensation) -> propagation -> report, plus amplitude calibration and
//! free-parameter pulse optimisation.

use alloc::vec::Vec;
#[allow(unused_imports)] // std supplies these inherently under test
use num_traits::Float;

use crate::calibration::{CompensationMap, CompensationMode};
use crate::device::{
    build_hamiltonian, coupler_branch, zero_coupling_point, DeviceSpec, HamiltonianTerms,
};
use crate::distortion::{apply_distortion_about, predistort_about, DistortionModel};
use crate::metrics::{gate_report, GateReport};
use crate::propagator::{
    propagate_with, ControlSchedule, Integrator, PropagationResult, PropagatorOptions,
};
use crate::pulse::{
    coupling_to_frequency, envelope, sample_pulse, CouplingMap, Parameterization, PulseFamily,
    PulseShapeSpec, SampledWaveform,
};
use crate::simplex::{initial_simplex, nelder_mead_minimize, Tolerances};
use crate::{Error, Result};

/// Default sample spacing, ns.
pub const DEFAULT_DT: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineDistortion {
    pub model: DistortionModel,
    /// Feed the predistorted waveform into the line.
    pub predistort: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GateSpec {
    pub pulse: PulseShapeSpec,
    /// Peak Q2 bare-frequency offset (GHz); follows the pulse envelope.
    pub q2_detune: f64,
    pub compensation: CompensationMode,
    /// Applied to the coupler line.
    pub distortion: Option<LineDistortion>,
    /// Requested sample spacing, ns; shrunk so an integer number of steps spans the pulse.
    pub dt: f64,
    pub integrator: Integrator,
}

impl GateSpec {
    pub fn new(pulse: PulseShapeSpec, q2_detune: f64) -> Self {
        GateSpec {
            pulse,
            q2_detune,
            compensation: CompensationMode::Off,
            distortion: None,
            dt: DEFAULT_DT,
            integrator: Integrator::Magnus4,
        }
    }

    /// Spacing actually used: length / ceil(length / dt).
    pub fn effective_dt(&self) -> f64 {
        let n = (self.pulse.length / self.dt - 1e-9).ceil().max(1.0);
        self.pulse.length / n
    }
}

/// Precomputed device data shared by every gate evaluation.
#[derive(Debug, Clone)]
pub struct GateContext {
    /// Device with the coupler idling at the zero-coupling point.
    pub spec: DeviceSpec,
    pub zero_point: f64,
    pub terms: HamiltonianTerms,
    pub coupling_map: CouplingMap,
    compensation_q2: CompensationMap,
    compensation_both: CompensationMap,
}

impl GateContext {
    pub fn new(spec: &DeviceSpec) -> Result<Self> {
        let zero_point = zero_coupling_point(spec)?;
        let idle = spec.with_coupler_frequency(zero_point);
        let terms = build_hamiltonian(&idle)?;
        let coupling_map = CouplingMap::build(&idle, CouplingMap::DEFAULT_POINTS)?;
        let (lo, hi) = coupler_branch(&idle);
        let compensation_q2 =
            CompensationMap::build(&idle, zero_point, CompensationMode::Q2Only, lo, hi, 1201)?;
        let compensation_both =
            CompensationMap::build(&idle, zero_point, CompensationMode::Both, lo, hi, 1201)?;
        Ok(GateContext {
            spec: idle,
            zero_point,
            terms,
            coupling_map,
            compensation_q2,
            compensation_both,
        })
    }

    pub fn compensation(&self, mode: CompensationMode) -> Option<&CompensationMap> {
        match mode {
            CompensationMode::Off => None,
            CompensationMode::Q2Only => Some(&self.compensation_q2),
            CompensationMode::Both => Some(&self.compensation_both),
        }
    }

    /// Coupler frequency of the idle value of a pulse.
    fn idle_frequency(&self, pulse: &PulseShapeSpec) -> Result<f64> {
        match pulse.parameterization {
            Parameterization::CouplerFrequency => Ok(pulse.idle_value),
            Parameterization::EffectiveCoupling => {
                let (min, max) = self.coupling_map.coupling_range();
                self.coupling_map
                    .frequency(pulse.idle_value)
                    .ok_or(Error::OutOfRange {
                        index: 0,
                        value: pulse.idle_value,
                        min,
                        max,
                    })
            }
        }
    }

    /// Ideal coupler-frequency waveform (before the line).
    pub fn coupler_waveform(&self, gate: &GateSpec) -> Result<SampledWaveform> {
        let wf = sample_pulse(&gate.pulse, gate.effective_dt())?;
        match wf.parameterization {
            Parameterization::CouplerFrequency => Ok(wf),
            Parameterization::EffectiveCoupling => coupling_to_frequency(&self.coupling_map, &wf),
        }
    }

    pub fn schedule(&self, gate: &GateSpec) -> Result<ControlSchedule> {
        let dt = gate.effective_dt();
        let env = envelope(&gate.pulse, dt)?;
        let ideal = self.coupler_waveform(gate)?;
        let idle = self.idle_frequency(&gate.pulse)?;
        let physical = match &gate.distortion {
            None => ideal,
            Some(line) => {
                let drive = if line.predistort {
                    predistort_about(&line.model, &ideal, idle)?
                } else {
                    ideal
                };
                apply_distortion_about(&line.model, &drive, idle)
            }
        };
        let n = physical.samples.len();
        let mut q1 = alloc::vec![0.0; n];
        let mut q2: Vec<f64> = env.iter().map(|e| gate.q2_detune * e).collect();
        if let Some(map) = self.compensation(gate.compensation) {
            for (k, &wc) in physical.samples.iter().enumerate() {
                let d = map.offsets(wc).map_err(|e| match e {
                    Error::OutOfRange {
                        value, min, max, ..
                    } => Error::OutOfRange {
                        index: k,
                        value,
                        min,
                        max,
                    },
                    other => other,
                })?;
                q1[k] += d[0];
                q2[k] += d[1];
            }
        }
        let mk = |samples| SampledWaveform {
            dt,
            samples,
            parameterization: Parameterization::CouplerFrequency,
        };
        let q1_used = q1.iter().any(|&v| v != 0.0);
        Ok(ControlSchedule {
            coupler_trajectory: physical,
            qubit_offsets: [if q1_used { Some(mk(q1)) } else { None }, Some(mk(q2))],
        })
    }

    pub fn propagate(
        &self,
        gate: &GateSpec,
        opts: &PropagatorOptions,
    ) -> Result<PropagationResult> {
        let mut o = *opts;
        o.integrator = gate.integrator;
        propagate_with(&self.terms, &self.schedule(gate)?, &o)
    }

    pub fn report(&self, gate: &GateSpec, opts: &PropagatorOptions) -> Result<GateReport> {
        gate_report(&self.propagate(gate, opts)?)
    }
}

/// Outcome of a calibration or optimisation.
#[derive(Debug, Clone)]
pub struct Tuned {
    pub gate: GateSpec,
    pub report: GateReport,
    pub evaluations: usize,
    pub hit_iteration_cap: bool,
    /// False when the best point sits on a penalised bound.
    pub within_bounds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FreeParameter {
    /// Peak value of the pulse (GHz).
    Peak,
    /// Pulse length (ns).
    Length,
    /// Peak Q2 detune (GHz).
    Detune,
    /// Weight of the second Slepian harmonic (first weight fixed at 1).
    Lambda1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    /// Free parameters with inclusive bounds.
    pub free: Vec<(FreeParameter, f64, f64)>,
    pub tolerances: Tolerances,
    /// Relative multi-start scale factors applied to the initial point.
    pub starts: Vec<Vec<f64>>,
    pub propagator: PropagatorOptions,
}

fn read(gate: &GateSpec, p: FreeParameter) -> f64 {
    match p {
        FreeParameter::Peak => gate.pulse.peak_value,
        FreeParameter::Length => gate.pulse.length,
        FreeParameter::Detune => gate.q2_detune,
        FreeParameter::Lambda1 => gate
            .pulse
            .slepian_coefficients
            .get(1)
            .copied()
            .unwrap_or(0.0),
    }
}

fn write(gate: &mut GateSpec, p: FreeParameter, v: f64) {
    match p {
        FreeParameter::Peak => gate.pulse.peak_value = v,
        FreeParameter::Length => gate.pulse.length = v,
        FreeParameter::Detune => gate.q2_detune = v,
        FreeParameter::Lambda1 => {
            let c = &mut gate.pulse.slepian_coefficients;
            if c.is_empty() {
                c.push(1.0);
            }
            if c.len() < 2 {
                c.push(v);
            } else {
                c[1] = v;
            }
        }
    }
}

fn step_size(p: FreeParameter, x: f64) -> f64 {
    match p {
        FreeParameter::Peak | FreeParameter::Detune => 0.1 * x.abs().max(0.01),
        FreeParameter::Length => 0.1 * x.abs().max(10.0),
        FreeParameter::Lambda1 => 0.1,
    }
}

/// Minimise 1 - fitted fidelity over the free parameters. Points outside
/// the bounds (or where the pipeline fails) score 1 plus the distance.
pub fn optimize(ctx: &GateContext, start: &GateSpec, opts: &OptimizeOptions) -> Result<Tuned> {
    if opts.free.is_empty() {
        return Err(Error::InvalidInput("no free parameters".into()));
    }
    for &(p, lo, hi) in &opts.free {
        if !(lo <= hi) {
            return Err(Error::InvalidInput(alloc::format!(
                "empty bounds for {p:?}"
            )));
        }
        if p == FreeParameter::Lambda1 && start.pulse.family != PulseFamily::Slepian {
            return Err(Error::InvalidInput(
                "lambda1 is only defined for slepian pulses".into(),
            ));
        }
    }
    let gate_at = |x: &[f64]| {
        let mut g = start.clone();
        for (&(p, _, _), &v) in opts.free.iter().zip(x) {
            write(&mut g, p, v);
        }
        g
    };
    let excess = |x: &[f64]| {
        opts.free
            .iter()
            .zip(x)
            .map(|(&(_, lo, hi), &v)| (lo - v).max(0.0) + (v - hi).max(0.0))
            .sum::<f64>()
    };
    let objective = |x: &[f64]| {
        let out = excess(x);
        if out > 0.0 {
            return 1.0 + out;
        }
        match ctx.report(&gate_at(x), &opts.propagator) {
            Ok(r) => 1.0 - r.fidelity,
            Err(_) => 1.5,
        }
    };
    let x0: Vec<f64> = opts
        .free
        .iter()
        .map(|&(p, lo, hi)| read(start, p).clamp(lo, hi))
        .collect();
    let starts = if opts.starts.is_empty() {
        alloc::vec![alloc::vec![1.0; x0.len()]]
    } else {
        opts.starts.clone()
    };
    let mut best: Option<crate::simplex::Minimum> = None;
    let mut evaluations = 0;
    for s in &starts {
        let xs: Vec<f64> = x0
            .iter()
            .zip(s.iter().chain(core::iter::repeat(&1.0)))
            .map(|(x, f)| x * f)
            .collect();
        let steps: Vec<f64> = opts
            .free
            .iter()
            .zip(&xs)
            .map(|(&(p, _, _), &x)| step_size(p, x))
            .collect();
        let r = nelder_mead_minimize(objective, initial_simplex(&xs, &steps), opts.tolerances);
        evaluations += r.evaluations;
        if best.as_ref().map_or(true, |b| r.value < b.value) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one start");
    let gate = gate_at(&best.point);
    let within_bounds = excess(&best.point) == 0.0;
    let report = ctx.report(&gate, &opts.propagator)?;
    Ok(Tuned {
        gate,
        report,
        evaluations,
        hit_iteration_cap: best.hit_iteration_cap,
        within_bounds,
    })
}

/// Amplitude calibration at fixed length: tune (peak, Q2 detune).
pub fn calibrate(ctx: &GateContext, start: &GateSpec) -> Result<Tuned> {
    let (gmin, gmax) = match start.pulse.parameterization {
        Parameterization::EffectiveCoupling => ctx.coupling_map.coupling_range(),
        Parameterization::CouplerFrequency => ctx.coupling_map.frequency_range(),
    };
    let opts = OptimizeOptions {
        free: alloc::vec![
            (FreeParameter::Peak, gmin, gmax),
            (FreeParameter::Detune, -0.3, 0.3)
        ],
        tolerances: Tolerances {
            diameter: 1e-9,
            spread: 1e-12,
            iterations_per_dim: 150,
        },
        starts: alloc::vec![
            alloc::vec![1.0, 1.0],
            alloc::vec![1.3, 1.0],
            alloc::vec![0.8, 1.2]
        ],
        propagator: PropagatorOptions::computational(),
    };
    optimize(ctx, start, &opts)
}

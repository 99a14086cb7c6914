// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration. Every section is optional and falls back to the
//! default device; unknown keys are rejected.

use std::path::Path;

use czsim_core::benchmarking::{Confusion, NoiseSpec, SimulationMode};
use czsim_core::calibration::CompensationMode;
use czsim_core::device::{CouplingGraph, DeviceSpec, FluxModel, ModeLabel, ModeSpec};
use czsim_core::distortion::{DistortionModel, SettlingTerm};
use czsim_core::gate::{FreeParameter, GateSpec, LineDistortion};
use czsim_core::propagator::{Integrator, PropagatorOptions};
use czsim_core::pulse::{Parameterization, PulseFamily, PulseShapeSpec};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Must equal 1.
    pub schema_version: u32,
    pub device: DeviceConfig,
    pub solver: SolverConfig,
    pub pulse: PulseConfig,
    /// Qubit frequency compensation applied while the coupler moves.
    pub compensation: CompensationName,
    pub distortion: Option<DistortionConfig>,
    pub noise: Option<NoiseConfig>,
    pub benchmark: BenchmarkConfig,
    pub sweep: SweepConfig,
    pub optimize: OptimizeConfig,
    pub seed: u64,
    pub output_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            device: DeviceConfig::default(),
            solver: SolverConfig::default(),
            pulse: PulseConfig::default(),
            compensation: CompensationName::Off,
            distortion: None,
            noise: None,
            benchmark: BenchmarkConfig::default(),
            sweep: SweepConfig::default(),
            optimize: OptimizeConfig::default(),
            seed: 0,
            output_dir: "czsim-out".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    /// 0-1 transition, GHz.
    pub frequency: f64,
    /// GHz, negative for transmons.
    pub anharmonicity: f64,
    pub levels: usize,
    /// Sweet-spot frequency for the flux map, GHz.
    #[serde(default)]
    pub max_frequency: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub g_1c: f64,
    pub g_2c: f64,
    pub g_12: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ReadoutConfig {
    pub f00: f64,
    pub f11: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceConfig {
    pub q1: ModeConfig,
    pub coupler: ModeConfig,
    pub q2: ModeConfig,
    pub couplings: CouplingConfig,
    /// Upper end of the coupler's tuning range, GHz.
    pub coupler_max_frequency: f64,
    /// Minimum coupler-qubit separation, GHz.
    pub resonance_guard: f64,
    /// Largest Hilbert-space dimension allowed.
    pub dimension_cap: usize,
    pub readout_q1: ReadoutConfig,
    pub readout_q2: ReadoutConfig,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        DeviceConfig::from_spec(&DeviceSpec::default())
    }
}

fn mode_config(m: &ModeSpec, flux: Option<FluxModel>) -> ModeConfig {
    ModeConfig {
        frequency: m.frequency,
        anharmonicity: m.anharmonicity,
        levels: m.levels,
        max_frequency: flux.map(|f| f.max_frequency),
    }
}

impl DeviceConfig {
    pub fn from_spec(spec: &DeviceSpec) -> Self {
        let ro = |k: usize| {
            spec.metadata[k]
                .map(|m| ReadoutConfig {
                    f00: m.f00,
                    f11: m.f11,
                })
                .unwrap_or(ReadoutConfig { f00: 1.0, f11: 1.0 })
        };
        DeviceConfig {
            q1: mode_config(&spec.modes[0], spec.flux_models[0]),
            coupler: mode_config(&spec.modes[1], spec.flux_models[1]),
            q2: mode_config(&spec.modes[2], spec.flux_models[2]),
            couplings: CouplingConfig {
                g_1c: spec.couplings.g_1c,
                g_2c: spec.couplings.g_2c,
                g_12: spec.couplings.g_12,
            },
            coupler_max_frequency: spec.coupler_max_frequency,
            resonance_guard: spec.resonance_guard,
            dimension_cap: spec.dimension_cap,
            readout_q1: ro(0),
            readout_q2: ro(1),
        }
    }

    pub fn to_spec(&self) -> Result<DeviceSpec, CliError> {
        let mut spec = DeviceSpec::default();
        let build = |label, m: &ModeConfig| ModeSpec {
            label,
            frequency: m.frequency,
            anharmonicity: m.anharmonicity,
            levels: m.levels,
        };
        spec.modes = [
            build(ModeLabel::Q1, &self.q1),
            build(ModeLabel::C, &self.coupler),
            build(ModeLabel::Q2, &self.q2),
        ];
        for (k, m) in [self.q1, self.coupler, self.q2].iter().enumerate() {
            spec.flux_models[k] = m.max_frequency.map(|f| FluxModel {
                max_frequency: f,
                anharmonicity: m.anharmonicity,
            });
        }
        spec.couplings = CouplingGraph {
            g_1c: self.couplings.g_1c,
            g_2c: self.couplings.g_2c,
            g_12: self.couplings.g_12,
        };
        spec.coupler_max_frequency = self.coupler_max_frequency;
        spec.resonance_guard = self.resonance_guard;
        spec.dimension_cap = self.dimension_cap;
        for (k, ro) in [self.readout_q1, self.readout_q2].iter().enumerate() {
            if let Some(meta) = spec.metadata[k].as_mut() {
                meta.f00 = ro.f00;
                meta.f11 = ro.f11;
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn confusion(&self) -> Vec<Confusion> {
        vec![
            Confusion {
                f00: self.readout_q1.f00,
                f11: self.readout_q1.f11,
            },
            Confusion {
                f00: self.readout_q2.f00,
                f11: self.readout_q2.f11,
            },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorName {
    Magnus4,
    Midpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Requested sample spacing, ns.
    pub dt_ns: f64,
    /// Reports whose unitarity defect exceeds this are rejected.
    pub unitarity_tolerance: f64,
    pub integrator: IntegratorName,
    /// Highest excitation-number sector propagated; null means all.
    pub max_excitation: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt_ns: 0.05,
            unitarity_tolerance: 1e-9,
            integrator: IntegratorName::Magnus4,
            max_excitation: Some(2),
        }
    }
}

impl SolverConfig {
    pub fn propagator(&self) -> PropagatorOptions {
        PropagatorOptions {
            integrator: self.integrator(),
            max_excitation: self.max_excitation,
            ..PropagatorOptions::default()
        }
    }

    pub fn integrator(&self) -> Integrator {
        match self.integrator {
            IntegratorName::Magnus4 => Integrator::Magnus4,
            IntegratorName::Midpoint => Integrator::Midpoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Square,
    Slepian,
    Cosine,
}

impl From<FamilyName> for PulseFamily {
    fn from(f: FamilyName) -> Self {
        match f {
            FamilyName::Square => PulseFamily::Square,
            FamilyName::Slepian => PulseFamily::Slepian,
            FamilyName::Cosine => PulseFamily::Cosine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum ParameterizationName {
    EffectiveCoupling,
    CouplerFrequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    pub family: FamilyName,
    pub length_ns: f64,
    /// Peak g_eff (GHz) or coupler frequency (GHz), per `parameterization`.
    pub peak: f64,
    /// Idle value in the same units; defaults to zero coupling.
    pub idle: Option<f64>,
    pub parameterization: ParameterizationName,
    /// Peak Q2 detune, GHz.
    pub q2_detune: f64,
    pub slepian_coefficients: Vec<f64>,
    /// Tune peak and detune before reporting.
    pub calibrate: bool,
}

impl Default for PulseConfig {
    fn default() -> Self {
        PulseConfig {
            family: FamilyName::Slepian,
            length_ns: 45.0,
            peak: -0.01784,
            idle: None,
            parameterization: ParameterizationName::EffectiveCoupling,
            q2_detune: -0.0297,
            slepian_coefficients: vec![1.0],
            calibrate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum CompensationName {
    Off,
    Q2Only,
    Both,
}

impl From<CompensationName> for CompensationMode {
    fn from(c: CompensationName) -> Self {
        match c {
            CompensationName::Off => CompensationMode::Off,
            CompensationName::Q2Only => CompensationMode::Q2Only,
            CompensationName::Both => CompensationMode::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SettlingConfig {
    pub amplitude: f64,
    pub tau_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct DistortionConfig {
    pub gain: f64,
    pub settling_terms: Vec<SettlingConfig>,
    /// Drive the line with the predistorted waveform.
    pub predistort: bool,
}

impl Default for DistortionConfig {
    fn default() -> Self {
        DistortionConfig {
            gain: 1.0,
            settling_terms: Vec::new(),
            predistort: true,
        }
    }
}

impl DistortionConfig {
    pub fn model(&self) -> DistortionModel {
        DistortionModel {
            gain: self.gain,
            settling_terms: self
                .settling_terms
                .iter()
                .map(|s| SettlingTerm {
                    amplitude: s.amplitude,
                    tau: s.tau_ns,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub depolarizing_per_cycle: f64,
    pub local_depolarizing_per_cycle: f64,
    /// Apply the device readout fidelities as confusion.
    pub readout_confusion: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum EntanglerName {
    /// diag(1, 1, 1, -1).
    Ideal,
    /// The calibrated pulse's projected map with virtual Z removed.
    Device,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Statevector,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkConfig {
    pub qubits: usize,
    pub depths: Vec<usize>,
    pub circuits_per_depth: usize,
    /// Shots per circuit; null uses exact distributions.
    pub shots: Option<u32>,
    pub mitigate_readout: bool,
    pub entangler: EntanglerName,
    pub mode: ModeName,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            qubits: 2,
            depths: czsim_core::benchmarking::DEFAULT_DEPTHS.to_vec(),
            circuits_per_depth: 50,
            shots: None,
            mitigate_readout: false,
            entangler: EntanglerName::Ideal,
            mode: ModeName::Density,
        }
    }
}

impl BenchmarkConfig {
    pub fn simulation_mode(&self) -> SimulationMode {
        match self.mode {
            ModeName::Statevector => SimulationMode::Statevector,
            ModeName::Density => SimulationMode::Density,
        }
    }
}

/// Inclusive evenly spaced range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl RangeConfig {
    pub fn values(&self) -> Vec<f64> {
        if !(self.step > 0.0) || !(self.stop >= self.start) {
            return Vec::new();
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + self.step * k as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Pulse lengths for the leakage-versus-length study, ns.
    pub lengths_ns: RangeConfig,
    pub families: Vec<FamilyName>,
    /// Points and spacing of the peak axis around the calibrated point.
    pub coupling_points: usize,
    pub coupling_step: f64,
    /// Points and spacing of the Q2 detune axis around the calibrated point, GHz.
    pub detune_points: usize,
    pub detune_step: f64,
    /// Gate counts for repeated-gate scans.
    pub gate_counts: Vec<u32>,
    /// Extra conditional phase per gate, degrees.
    pub injected_phase_deg: f64,
    /// Compensation used for the calibration scans.
    pub scan_compensation: CompensationName,
    /// Coupler frequencies for the compensation study, GHz.
    pub coupler_frequencies: RangeConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            lengths_ns: RangeConfig {
                start: 20.0,
                stop: 80.0,
                step: 2.5,
            },
            families: vec![FamilyName::Square, FamilyName::Slepian, FamilyName::Cosine],
            coupling_points: 21,
            coupling_step: 0.00025,
            detune_points: 21,
            detune_step: 0.0005,
            gate_counts: (1..=20).collect(),
            injected_phase_deg: 0.0,
            scan_compensation: CompensationName::Q2Only,
            coupler_frequencies: RangeConfig {
                start: 5.3,
                stop: 7.0,
                step: 0.01,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum FreeName {
    Peak,
    Length,
    Detune,
    Lambda1,
}

impl From<FreeName> for FreeParameter {
    fn from(f: FreeName) -> Self {
        match f {
            FreeName::Peak => FreeParameter::Peak,
            FreeName::Length => FreeParameter::Length,
            FreeName::Detune => FreeParameter::Detune,
            FreeName::Lambda1 => FreeParameter::Lambda1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeConfig {
    pub families: Vec<FamilyName>,
    /// Common peak shared by every family (the lowest coupler level).
    pub peak: f64,
    pub free: Vec<FreeName>,
    pub peak_bounds: Bounds,
    pub length_bounds_ns: Bounds,
    pub detune_bounds: Bounds,
    pub lambda1_bounds: Bounds,
    pub iterations_per_dim: usize,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            families: vec![FamilyName::Square, FamilyName::Slepian, FamilyName::Cosine],
            peak: -0.016,
            free: vec![FreeName::Length, FreeName::Detune],
            peak_bounds: Bounds {
                lo: -0.0255,
                hi: 0.0,
            },
            length_bounds_ns: Bounds {
                lo: 10.0,
                hi: 100.0,
            },
            detune_bounds: Bounds { lo: -0.3, hi: 0.3 },
            lambda1_bounds: Bounds { lo: -1.0, hi: 1.0 },
            iterations_per_dim: 150,
        }
    }
}

impl OptimizeConfig {
    pub fn bounds(&self, p: FreeName) -> Bounds {
        match p {
            FreeName::Peak => self.peak_bounds,
            FreeName::Length => self.length_bounds_ns,
            FreeName::Detune => self.detune_bounds,
            FreeName::Lambda1 => self.lambda1_bounds,
        }
    }
}

fn check(cond: bool, what: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::config_invalid(what))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::config_invalid(&e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => CliError::config_not_found(path),
            _ => CliError::io(path, &e),
        })?;
        Self::from_json(&text)
    }

    /// Range checks that the schema's types alone cannot express.
    pub fn validate(&self) -> Result<(), CliError> {
        check(
            self.schema_version == SCHEMA_VERSION,
            "schema_version must be 1",
        )?;
        self.device.to_spec()?;
        let s = &self.solver;
        check(
            s.dt_ns > 0.0 && s.dt_ns.is_finite(),
            "solver.dt_ns must be positive",
        )?;
        check(
            s.unitarity_tolerance > 0.0,
            "solver.unitarity_tolerance must be positive",
        )?;
        check(
            self.pulse.length_ns > 0.0,
            "pulse.length_ns must be positive",
        )?;
        self.pulse_spec().validate()?;
        if let Some(d) = &self.distortion {
            d.model().validate()?;
        }
        if let Some(n) = &self.noise {
            self.noise_spec(self.benchmark.qubits)
                .validate(self.benchmark.qubits)?;
            check(
                n.depolarizing_per_cycle >= 0.0,
                "noise probabilities must be non-negative",
            )?;
        }
        let b = &self.benchmark;
        check(
            b.qubits == 1 || b.qubits == 2,
            "benchmark.qubits must be 1 or 2",
        )?;
        check(
            b.depths.len() >= 3 && b.depths.iter().all(|&d| d >= 1),
            "benchmark.depths needs >= 3 positive depths",
        )?;
        check(
            b.circuits_per_depth >= 10,
            "benchmark.circuits_per_depth must be >= 10",
        )?;
        let w = &self.sweep;
        check(
            w.coupling_points >= 1 && w.detune_points >= 1,
            "sweep axes need at least one point",
        )?;
        check(
            w.coupling_step > 0.0 && w.detune_step > 0.0,
            "sweep steps must be positive",
        )?;
        check(
            self.optimize.iterations_per_dim >= 1,
            "optimize.iterations_per_dim must be >= 1",
        )?;
        Ok(())
    }

    pub fn device_spec(&self) -> DeviceSpec {
        self.device.to_spec().expect("validated")
    }

    pub fn pulse_spec(&self) -> PulseShapeSpec {
        let p = &self.pulse;
        let parameterization = match p.parameterization {
            ParameterizationName::EffectiveCoupling => Parameterization::EffectiveCoupling,
            ParameterizationName::CouplerFrequency => Parameterization::CouplerFrequency,
        };
        let idle = p.idle.unwrap_or(match parameterization {
            Parameterization::EffectiveCoupling => 0.0,
            // Resolved against the device's zero-coupling point by the caller.
            Parameterization::CouplerFrequency => f64::NAN,
        });
        PulseShapeSpec {
            family: p.family.into(),
            length: p.length_ns,
            idle_value: if idle.is_nan() { p.peak } else { idle },
            peak_value: p.peak,
            parameterization,
            slepian_coefficients: p.slepian_coefficients.clone(),
        }
    }

    /// Gate description; `zero_point` fills a missing coupler-frequency idle value.
    pub fn gate_spec(&self, zero_point: f64) -> GateSpec {
        let mut pulse = self.pulse_spec();
        if self.pulse.idle.is_none() && pulse.parameterization == Parameterization::CouplerFrequency
        {
            pulse.idle_value = zero_point;
        }
        let mut g = GateSpec::new(pulse, self.pulse.q2_detune);
        g.compensation = self.compensation.into();
        g.dt = self.solver.dt_ns;
        g.integrator = self.solver.integrator();
        g.distortion = self.distortion.as_ref().map(|d| LineDistortion {
            model: d.model(),
            predistort: d.predistort,
        });
        g
    }

    pub fn noise_spec(&self, qubits: usize) -> NoiseSpec {
        match &self.noise {
            None => NoiseSpec::default(),
            Some(n) => NoiseSpec {
                depolarizing_per_cycle: n.depolarizing_per_cycle,
                local_depolarizing_per_cycle: n.local_depolarizing_per_cycle,
                readout: if n.readout_confusion {
                    self.device.confusion()[..qubits].to_vec()
                } else {
                    Vec::new()
                },
            },
        }
    }

    /// Canonical JSON used for the config hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }
}

/// JSON schema of the configuration file.
pub fn schema_json() -> String {
    let schema = schemars::schema_for!(RunConfig);
    serde_json::to_string_pretty(&schema).expect("schema serialises") + "\n"
}

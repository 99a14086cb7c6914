// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! The computations behind each output file, kept apart from file handling
//! so tests can call them directly.

use czsim_core::benchmarking::{
    circuit_plan, run_circuit, summarize, Entangler, XebConfig, XebRun,
};
use czsim_core::calibration::{
    coupling_detune_scan, dressed_qubit_frequencies, repeated_gate_scan, GridMap, RepeatAxis,
    ScanGrid, ScanResult,
};
use czsim_core::device::frequency_to_flux;
use czsim_core::gate::{calibrate, optimize, GateContext, GateSpec, OptimizeOptions, Tuned};
use czsim_core::metrics::{corrected_unitary, GateReport};
use czsim_core::propagator::PropagatorOptions;
use czsim_core::pulse::{sample_pulse, PulseFamily};
use czsim_core::simplex::Tolerances;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{EntanglerName, RunConfig};
use crate::error::CliError;

/// Serializable view of a gate report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportView {
    pub fidelity: f64,
    pub leakage_from_11: f64,
    /// (label, population) for dressed |2, i, 0>.
    pub leakage_levels: Vec<([usize; 3], f64)>,
    pub conditional_phase_deg: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub subspace_trace_loss: f64,
    pub unitarity_defect: f64,
    /// Rows of [re, im] pairs in the |00>, |01>, |10>, |11> basis.
    pub projected_map: Vec<Vec<[f64; 2]>>,
}

impl From<&GateReport> for ReportView {
    fn from(r: &GateReport) -> Self {
        ReportView {
            fidelity: r.fidelity,
            leakage_from_11: r.leakage_from_11,
            leakage_levels: r.leakage_levels.clone(),
            conditional_phase_deg: r.conditional_phase_deg(),
            delta_plus: r.fitted_angles.delta_plus,
            delta_minus: r.fitted_angles.delta_minus,
            subspace_trace_loss: r.subspace_trace_loss,
            unitarity_defect: r.unitarity_defect,
            projected_map: (0..4)
                .map(|i| {
                    (0..4)
                        .map(|j| [r.projected_map[(i, j)].re, r.projected_map[(i, j)].im])
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GateOutcome {
    pub gate: GateSpec,
    pub calibrated: bool,
    pub evaluations: usize,
    pub hit_iteration_cap: bool,
    pub report: ReportView,
}

/// Context for the configured device.
pub fn context(cfg: &RunConfig) -> Result<GateContext, CliError> {
    Ok(GateContext::new(&cfg.device_spec())?)
}

fn checked_report(
    ctx: &GateContext,
    cfg: &RunConfig,
    gate: &GateSpec,
) -> Result<GateReport, CliError> {
    let report = ctx.report(gate, &cfg.solver.propagator())?;
    if report.unitarity_defect > cfg.solver.unitarity_tolerance {
        return Err(CliError {
            kind: "unitarity".into(),
            message: format!(
                "unitarity defect {:e} exceeds {:e}",
                report.unitarity_defect, cfg.solver.unitarity_tolerance
            ),
            exit_code: 1,
        });
    }
    Ok(report)
}

/// The configured gate, calibrated at fixed length when the config asks for it.
pub fn gate_outcome(
    ctx: &GateContext,
    cfg: &RunConfig,
    gate: &GateSpec,
) -> Result<(GateOutcome, GateReport), CliError> {
    let (gate, evaluations, cap) = if cfg.pulse.calibrate {
        let t = calibrate(ctx, gate)?;
        (t.gate, t.evaluations, t.hit_iteration_cap)
    } else {
        (gate.clone(), 1, false)
    };
    let report = checked_report(ctx, cfg, &gate)?;
    let outcome = GateOutcome {
        gate,
        calibrated: cfg.pulse.calibrate,
        evaluations,
        hit_iteration_cap: cap,
        report: (&report).into(),
    };
    Ok((outcome, report))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LengthPoint {
    pub length_ns: f64,
    pub fidelity: f64,
    pub leakage_from_11: f64,
    pub conditional_phase_deg: f64,
    pub peak: f64,
    pub q2_detune: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LengthSeries {
    pub family: PulseFamily,
    pub points: Vec<LengthPoint>,
}

/// Leakage against pulse length, each length calibrated in (peak, detune).
/// Each family's chain starts at the longest length, with the peak scaled
/// to keep the configured pulse area, and warm-starts the next shorter one.
pub fn length_sweep<M: GridMap>(
    ctx: &GateContext,
    cfg: &RunConfig,
    mapper: &M,
) -> Result<Vec<LengthSeries>, CliError> {
    let mut lengths = cfg.sweep.lengths_ns.values();
    if lengths.is_empty() {
        return Err(CliError::usage("sweep.lengths_ns is empty"));
    }
    lengths.sort_by(|a, b| b.total_cmp(a));
    let families = cfg.sweep.families.clone();
    let base = cfg.gate_spec(ctx.zero_point);
    let chains = mapper.map(families.len(), |k| -> Result<LengthSeries, CliError> {
        let mut g = base.clone();
        g.pulse.family = families[k].into();
        g.pulse.peak_value = base.pulse.peak_value * base.pulse.length / lengths[0];
        let mut points = Vec::with_capacity(lengths.len());
        for &len in &lengths {
            g.pulse.length = len;
            let t = calibrate(ctx, &g)?;
            points.push(LengthPoint {
                length_ns: len,
                fidelity: t.report.fidelity,
                leakage_from_11: t.report.leakage_from_11,
                conditional_phase_deg: t.report.conditional_phase_deg(),
                peak: t.gate.pulse.peak_value,
                q2_detune: t.gate.q2_detune,
            });
            g = t.gate;
        }
        points.reverse();
        Ok(LengthSeries {
            family: families[k].into(),
            points,
        })
    });
    chains.into_iter().collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizedPulse {
    pub family: PulseFamily,
    pub gate: GateSpec,
    pub evaluations: usize,
    pub hit_iteration_cap: bool,
    pub within_bounds: bool,
    pub report: ReportView,
    /// (t ns, coupler GHz) of the best waveform.
    pub waveform: Vec<[f64; 2]>,
}

/// First-guess length at a given peak coupling. A square pulse needs one full
/// |101>-|200> exchange, T = 1/(2 sqrt 2 |g|); the smooth shapes spend part of
/// the pulse on their ramps and need roughly 2.2 times longer.
pub fn initial_length(family: PulseFamily, peak: f64) -> f64 {
    let square = 1.0 / (2.0 * core::f64::consts::SQRT_2 * peak.abs().max(1e-4));
    match family {
        PulseFamily::Square => square,
        PulseFamily::Slepian => 2.2 * square,
        PulseFamily::Cosine => 2.3 * square,
    }
}

/// Per-family optimum at the configured common peak.
pub fn optimize_families<M: GridMap>(
    ctx: &GateContext,
    cfg: &RunConfig,
    mapper: &M,
) -> Result<Vec<OptimizedPulse>, CliError> {
    let o = &cfg.optimize;
    if o.families.is_empty() || o.free.is_empty() {
        return Err(CliError::usage(
            "optimize needs at least one family and one free parameter",
        ));
    }
    let base = cfg.gate_spec(ctx.zero_point);
    let runs = mapper.map(o.families.len(), |k| -> Result<OptimizedPulse, CliError> {
        let family: PulseFamily = o.families[k].into();
        let mut g = base.clone();
        g.pulse.family = family;
        g.pulse.peak_value = o.peak;
        g.pulse.length = initial_length(family, o.peak);
        let free: Vec<_> = o
            .free
            .iter()
            .filter(|&&p| p != crate::config::FreeName::Lambda1 || family == PulseFamily::Slepian)
            .map(|&p| {
                let b = o.bounds(p);
                (p.into(), b.lo, b.hi)
            })
            .collect();
        if g.pulse.family == PulseFamily::Slepian
            && g.pulse.slepian_coefficients.len() < 2
            && free
                .iter()
                .any(|f| f.0 == czsim_core::gate::FreeParameter::Lambda1)
        {
            g.pulse.slepian_coefficients = vec![1.0, 0.0];
        }
        // Detune restarts at 0.7x and 1.4x guard against the neighbouring resonance branch.
        let starts = (0..3)
            .map(|s| {
                free.iter()
                    .map(|f| match (f.0, s) {
                        (czsim_core::gate::FreeParameter::Detune, 1) => 0.7,
                        (czsim_core::gate::FreeParameter::Detune, 2) => 1.4,
                        _ => 1.0,
                    })
                    .collect()
            })
            .collect();
        let opts = OptimizeOptions {
            free,
            tolerances: Tolerances {
                diameter: 1e-9,
                spread: 1e-12,
                iterations_per_dim: o.iterations_per_dim,
            },
            starts,
            propagator: PropagatorOptions::computational(),
        };
        let t: Tuned = optimize(ctx, &g, &opts)?;
        let report = checked_report(ctx, cfg, &t.gate)?;
        let wf = ctx.coupler_waveform(&t.gate)?;
        let waveform = wf.times().zip(&wf.samples).map(|(t, &w)| [t, w]).collect();
        Ok(OptimizedPulse {
            family,
            gate: t.gate,
            evaluations: t.evaluations,
            hit_iteration_cap: t.hit_iteration_cap,
            within_bounds: t.within_bounds,
            report: (&report).into(),
            waveform,
        })
    });
    runs.into_iter().collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompensationRow {
    pub coupler_ghz: f64,
    /// Coupler flux, flux quanta; NaN without a coupler flux model.
    pub coupler_flux: f64,
    /// Dressed shifts from the zero-coupling values without correction, GHz.
    pub shift_q1: f64,
    pub shift_q2: f64,
    /// Bare offsets applied by the correction, GHz.
    pub offset_q1: f64,
    pub offset_q2: f64,
    /// Dressed shifts left after correction, GHz.
    pub residual_q1: f64,
    pub residual_q2: f64,
}

/// Qubit frequency shifts across the coupler range, before and after correcting both qubits.
pub fn compensation_study(
    ctx: &GateContext,
    cfg: &RunConfig,
) -> Result<Vec<CompensationRow>, CliError> {
    let wcs = cfg.sweep.coupler_frequencies.values();
    if wcs.is_empty() {
        return Err(CliError::usage("sweep.coupler_frequencies is empty"));
    }
    let spec = &ctx.spec;
    let reference = dressed_qubit_frequencies(spec, ctx.zero_point)?;
    let curve = czsim_core::calibration::compensation_curve(spec, ctx.zero_point, &wcs)?;
    let (w1, w2) = spec.qubit_frequencies();
    curve
        .into_iter()
        .map(|(wc, d1, d2)| {
            let raw = dressed_qubit_frequencies(spec, wc)?;
            let mut shifted = spec.clone();
            shifted.modes[0].frequency = w1 + d1;
            shifted.modes[2].frequency = w2 + d2;
            let fixed = dressed_qubit_frequencies(&shifted, wc)?;
            let flux = spec.flux_models[1].map_or(Ok(f64::NAN), |m| frequency_to_flux(&m, wc))?;
            Ok(CompensationRow {
                coupler_ghz: wc,
                coupler_flux: flux,
                shift_q1: raw[0] - reference[0],
                shift_q2: raw[1] - reference[1],
                offset_q1: d1,
                offset_q2: d2,
                residual_q1: fixed[0] - reference[0],
                residual_q2: fixed[1] - reference[1],
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationScans {
    pub operating_point: GateOutcome,
    pub leakage: ScanResult,
    pub phase: ScanResult,
}

/// Calibrated operating point (with the scan compensation) and the grid spanned around it.
pub fn operating_point(
    ctx: &GateContext,
    cfg: &RunConfig,
) -> Result<(GateSpec, GateOutcome), CliError> {
    let mut g = cfg.gate_spec(ctx.zero_point);
    g.compensation = cfg.sweep.scan_compensation.into();
    let t = calibrate(ctx, &g)?;
    let report = checked_report(ctx, cfg, &t.gate)?;
    let outcome = GateOutcome {
        gate: t.gate.clone(),
        calibrated: true,
        evaluations: t.evaluations,
        hit_iteration_cap: t.hit_iteration_cap,
        report: (&report).into(),
    };
    Ok((t.gate, outcome))
}

pub fn scan_grid(cfg: &RunConfig, gate: &GateSpec) -> ScanGrid {
    ScanGrid {
        coupling_axis: ScanGrid::centred_axis(
            gate.pulse.peak_value,
            cfg.sweep.coupling_step,
            cfg.sweep.coupling_points,
        ),
        detune_axis: ScanGrid::centred_axis(
            gate.q2_detune,
            cfg.sweep.detune_step,
            cfg.sweep.detune_points,
        ),
        gate_count_axis: vec![1],
    }
}

pub fn calibration_scans<M: GridMap>(
    ctx: &GateContext,
    cfg: &RunConfig,
    mapper: &M,
) -> Result<CalibrationScans, CliError> {
    let (gate, outcome) = operating_point(ctx, cfg)?;
    let (leakage, phase) = coupling_detune_scan(ctx, &scan_grid(cfg, &gate), &gate, mapper)?;
    Ok(CalibrationScans {
        operating_point: outcome,
        leakage,
        phase,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RepeatedScans {
    pub operating_point: GateOutcome,
    pub injected_phase_deg: f64,
    pub leakage: ScanResult,
    pub phase_deviation: ScanResult,
}

pub fn repeated_scans<M: GridMap>(
    ctx: &GateContext,
    cfg: &RunConfig,
    axis: RepeatAxis,
    mapper: &M,
) -> Result<RepeatedScans, CliError> {
    if cfg.sweep.gate_counts.is_empty() {
        return Err(CliError::usage("sweep.gate_counts is empty"));
    }
    let (gate, outcome) = operating_point(ctx, cfg)?;
    let grid = scan_grid(cfg, &gate);
    let values = match axis {
        RepeatAxis::Coupling => grid.coupling_axis,
        RepeatAxis::Detune => grid.detune_axis,
    };
    let (leakage, phase_deviation) = repeated_gate_scan(
        ctx,
        &gate,
        &cfg.sweep.gate_counts,
        axis,
        &values,
        cfg.sweep.injected_phase_deg.to_radians(),
        mapper,
    )?;
    Ok(RepeatedScans {
        operating_point: outcome,
        injected_phase_deg: cfg.sweep.injected_phase_deg,
        leakage,
        phase_deviation,
    })
}

/// The two-qubit entangler for benchmarking: ideal, or the calibrated
/// gate's projected map with virtual Z removed and made unitary.
pub fn entangler(ctx: Option<&GateContext>, cfg: &RunConfig) -> Result<Entangler, CliError> {
    match cfg.benchmark.entangler {
        EntanglerName::Ideal => Ok(Entangler::Ideal),
        EntanglerName::Device => {
            let owned;
            let ctx = match ctx {
                Some(c) => c,
                None => {
                    owned = context(cfg)?;
                    &owned
                }
            };
            let (_, report) = gate_outcome(ctx, cfg, &cfg.gate_spec(ctx.zero_point))?;
            let u = corrected_unitary(&report.projected_map, report.fitted_angles);
            let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
            for (i, row) in m.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    *x = u[(i, j)];
                }
            }
            Ok(Entangler::Device(m))
        }
    }
}

pub fn xeb_config(cfg: &RunConfig, qubits: usize, entangler: Entangler) -> XebConfig {
    let b = &cfg.benchmark;
    XebConfig {
        n_qubits: qubits,
        depths: b.depths.clone(),
        circuits_per_depth: b.circuits_per_depth,
        seed: cfg.seed,
        noise: cfg.noise_spec(qubits),
        entangler: if qubits == 2 {
            entangler
        } else {
            Entangler::Ideal
        },
        shots: b.shots,
        mitigate_readout: b.mitigate_readout,
        mode: b.simulation_mode(),
    }
}

/// Random-circuit benchmarking with circuits spread over the mapper.
pub fn benchmark<M: GridMap>(xcfg: &XebConfig, mapper: &M) -> Result<XebRun, CliError> {
    let plan = circuit_plan(xcfg);
    let records = mapper.map(plan.len(), |k| run_circuit(xcfg, plan[k].0, plan[k].1));
    let records = records.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(summarize(xcfg, records)?)
}

/// Ideal waveform for a family at the configured pulse settings, as (t, value).
pub fn ideal_waveform(cfg: &RunConfig, family: PulseFamily) -> Result<Vec<[f64; 2]>, CliError> {
    let mut p = cfg.pulse_spec();
    p.family = family;
    let wf = sample_pulse(&p, cfg.solver.dt_ns.min(p.length / 20.0))?;
    Ok(wf.times().zip(&wf.samples).map(|(t, &v)| [t, v]).collect())
}

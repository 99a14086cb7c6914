// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use czsim_core::benchmarking::XebRun;
use czsim_core::calibration::RepeatAxis;
use czsim_core::distortion::{apply_distortion_about, predistort_about};
use czsim_core::pulse::{Parameterization, PulseFamily, SampledWaveform};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::figures;
use crate::output::{read_waveform_csv, Header, OutputSet};
use crate::parallel::RayonMap;

/// Shared state of one invocation.
pub struct Invocation {
    pub config: RunConfig,
    pub output_dir: PathBuf,
    pub mapper: RayonMap,
}

impl Invocation {
    pub fn new(
        config: RunConfig,
        output_dir: Option<PathBuf>,
        threads: usize,
    ) -> Result<Self, CliError> {
        let output_dir = output_dir.unwrap_or_else(|| PathBuf::from(&config.output_dir));
        Ok(Invocation {
            config,
            output_dir,
            mapper: RayonMap::new(threads)?,
        })
    }

    fn outputs(&self, command: &str) -> Result<OutputSet, CliError> {
        let header = Header::new(command, &self.config.canonical_json(), self.config.seed);
        OutputSet::new(&self.output_dir, header)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Length,
    CouplingDetune,
    RepeatCoupling,
    RepeatDetune,
}

/// What a command produced, for the summary line on stdout.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: String,
    pub files: Vec<PathBuf>,
    pub detail: serde_json::Value,
}

fn finish(out: OutputSet, detail: serde_json::Value) -> Summary {
    Summary {
        command: out.header().command.clone(),
        files: out.written().to_vec(),
        detail,
    }
}

/// Command-line overrides for `gate`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GateFlags {
    pub shape: Option<PulseFamily>,
    pub length_ns: Option<f64>,
}

/// The configured gate with flag overrides. Changing shape or length re-derives
/// the starting peak from the exchange-time estimate, keeping the configured sign.
pub fn flagged_gate(
    cfg: &RunConfig,
    zero_point: f64,
    flags: GateFlags,
) -> Result<czsim_core::gate::GateSpec, CliError> {
    let mut g = cfg.gate_spec(zero_point);
    if flags.shape.is_none() && flags.length_ns.is_none() {
        return Ok(g);
    }
    if let Some(f) = flags.shape {
        g.pulse.family = f;
    }
    if let Some(len) = flags.length_ns {
        if !(len.is_finite() && len > 0.0) {
            return Err(CliError::usage("--length-ns must be positive"));
        }
        g.pulse.length = len;
    }
    let unit = figures::initial_length(g.pulse.family, 1.0);
    g.pulse.peak_value = unit / g.pulse.length * if g.pulse.peak_value > 0.0 { 1.0 } else { -1.0 };
    Ok(g)
}

pub fn cmd_gate(inv: &Invocation, flags: GateFlags) -> Result<Summary, CliError> {
    let cfg = &inv.config;
    let ctx = figures::context(cfg)?;
    let (outcome, _) =
        figures::gate_outcome(&ctx, cfg, &flagged_gate(cfg, ctx.zero_point, flags)?)?;
    let mut out = inv.outputs("gate")?;
    out.json("gate_report.json", &outcome)?;
    let detail = serde_json::json!({
        "fidelity": outcome.report.fidelity,
        "leakage_from_11": outcome.report.leakage_from_11,
        "conditional_phase_deg": outcome.report.conditional_phase_deg,
    });
    Ok(finish(out, detail))
}

pub fn cmd_sweep(inv: &Invocation, axis: SweepAxis) -> Result<Summary, CliError> {
    let cfg = &inv.config;
    let ctx = figures::context(cfg)?;
    match axis {
        SweepAxis::Length => {
            let series = figures::length_sweep(&ctx, cfg, &inv.mapper)?;
            let mut out = inv.outputs("sweep length")?;
            let mut columns = vec!["length_ns".to_string()];
            for s in &series {
                columns.push(format!("{}_leakage", s.family.name()));
                columns.push(format!("{}_fidelity", s.family.name()));
            }
            let rows: Vec<Vec<f64>> = (0..series[0].points.len())
                .map(|i| {
                    let mut r = vec![series[0].points[i].length_ns];
                    for s in &series {
                        r.push(s.points[i].leakage_from_11);
                        r.push(s.points[i].fidelity);
                    }
                    r
                })
                .collect();
            let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
            out.csv("fig2b_leakage.csv", &cols, &rows)?;
            out.json("fig2b_leakage.json", &series)?;
            Ok(finish(
                out,
                serde_json::json!({ "families": series.len(), "lengths": rows.len() }),
            ))
        }
        SweepAxis::CouplingDetune => {
            let scans = figures::calibration_scans(&ctx, cfg, &inv.mapper)?;
            let mut out = inv.outputs("sweep coupling-detune")?;
            let g = &scans.leakage.grid;
            out.grid_csv(
                "fig4a_leakage.csv",
                "detune_ghz\\peak",
                &g.detune_axis,
                &g.coupling_axis,
                &scans.leakage.values,
            )?;
            out.grid_csv(
                "fig4b_phase.csv",
                "detune_ghz\\peak",
                &g.detune_axis,
                &g.coupling_axis,
                &scans.phase.values,
            )?;
            out.json("fig4ab_scans.json", &scans)?;
            let detail = serde_json::json!({
                "operating_point_fidelity": scans.operating_point.report.fidelity,
                "operating_point_phase_deg": scans.operating_point.report.conditional_phase_deg,
            });
            Ok(finish(out, detail))
        }
        SweepAxis::RepeatCoupling | SweepAxis::RepeatDetune => {
            let (ax, tag, name) = match axis {
                SweepAxis::RepeatCoupling => (RepeatAxis::Coupling, "fig4c", "peak"),
                _ => (RepeatAxis::Detune, "fig4d", "detune_ghz"),
            };
            let scans = figures::repeated_scans(&ctx, cfg, ax, &inv.mapper)?;
            let mut out = inv.outputs(if ax == RepeatAxis::Coupling {
                "sweep repeat-coupling"
            } else {
                "sweep repeat-detune"
            })?;
            let rows: Vec<f64> = scans
                .leakage
                .grid
                .gate_count_axis
                .iter()
                .map(|&n| n as f64)
                .collect();
            let cols = scans.leakage.axis_values(scans.leakage.col_axis);
            let corner = format!("n_cz\\{name}");
            out.grid_csv(
                &format!("{tag}_leakage.csv"),
                &corner,
                &rows,
                &cols,
                &scans.leakage.values,
            )?;
            out.grid_csv(
                &format!("{tag}_phase_deviation.csv"),
                &corner,
                &rows,
                &cols,
                &scans.phase_deviation.values,
            )?;
            out.json(&format!("{tag}_scans.json"), &scans)?;
            Ok(finish(
                out,
                serde_json::json!({ "gate_counts": rows.len(), "points": cols.len() }),
            ))
        }
    }
}

pub fn cmd_optimize(inv: &Invocation) -> Result<Summary, CliError> {
    let cfg = &inv.config;
    let ctx = figures::context(cfg)?;
    let best = figures::optimize_families(&ctx, cfg, &inv.mapper)?;
    let mut out = inv.outputs("optimize")?;
    for b in &best {
        let rows: Vec<Vec<f64>> = b.waveform.iter().map(|p| vec![p[0], p[1]]).collect();
        out.csv(
            &format!("fig2a_waveform_{}.csv", b.family.name()),
            &["t_ns", "coupler_ghz"],
            &rows,
        )?;
    }
    out.json("optimize.json", &best)?;
    let detail: Vec<_> = best
        .iter()
        .map(|b| {
            serde_json::json!({
                "family": b.family.name(),
                "length_ns": b.gate.pulse.length,
                "fidelity": b.report.fidelity,
                "within_bounds": b.within_bounds,
                "hit_iteration_cap": b.hit_iteration_cap,
            })
        })
        .collect();
    Ok(finish(out, serde_json::Value::Array(detail)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchKind {
    Xeb,
    Spb,
}

fn bench_rows(run: &XebRun, kind: BenchKind) -> Vec<Vec<f64>> {
    run.estimates
        .iter()
        .map(|e| match kind {
            BenchKind::Xeb => vec![e.depth as f64, e.fidelity, e.fidelity_std],
            BenchKind::Spb => vec![e.depth as f64, e.purity, e.purity_fidelity],
        })
        .collect()
}

pub fn cmd_benchmark(
    inv: &Invocation,
    kind: BenchKind,
    qubits: usize,
) -> Result<Summary, CliError> {
    let cfg = &inv.config;
    if qubits != 1 && qubits != 2 {
        return Err(CliError::usage("--qubits must be 1 or 2"));
    }
    let ent = if qubits == 2 {
        figures::entangler(None, cfg)?
    } else {
        czsim_core::benchmarking::Entangler::Ideal
    };
    let xcfg = figures::xeb_config(cfg, qubits, ent);
    let run = figures::benchmark(&xcfg, &inv.mapper)?;
    let (command, tag) = match (kind, qubits) {
        (BenchKind::Xeb, 1) => ("xeb", "fig5a_xeb"),
        (BenchKind::Spb, 1) => ("spb", "fig5b_spb"),
        (BenchKind::Xeb, _) => ("xeb", "fig5c_xeb"),
        (BenchKind::Spb, _) => ("spb", "fig5c_spb"),
    };
    let mut out = inv.outputs(command)?;
    let cols: &[&str] = match kind {
        BenchKind::Xeb => &["depth", "xeb_fidelity", "xeb_fidelity_std"],
        BenchKind::Spb => &["depth", "purity", "purity_fidelity"],
    };
    out.csv(&format!("{tag}.csv"), cols, &bench_rows(&run, kind))?;
    out.json(&format!("{tag}.json"), &run)?;
    let detail = serde_json::json!({
        "qubits": qubits,
        "cycle_fidelity": run.fit.alpha,
        "cycle_fidelity_std": run.fit.alpha_std,
        "pauli_error": run.fit.pauli_error,
        "average_error": run.fit.average_error,
        "purity_fidelity": run.purity_fit.alpha,
        "control_error": run.control_error,
    });
    Ok(finish(out, detail))
}

#[derive(Debug, Clone, Serialize)]
pub struct PredistortReport {
    pub samples: usize,
    pub dt_ns: f64,
    pub baseline: f64,
    /// max |delivered - ideal| / max |ideal|.
    pub round_trip_relative_error: f64,
}

/// Predistort a waveform about its first sample (the line's resting level)
/// and report how well the model's line reproduces the input.
pub fn predistort_samples(
    cfg: &RunConfig,
    dt: f64,
    samples: Vec<f64>,
) -> Result<(SampledWaveform, SampledWaveform, PredistortReport), CliError> {
    let model = cfg.distortion.as_ref().map(|d| d.model()).ok_or(CliError {
        kind: "missing_distortion_model".into(),
        message: "config has no distortion section".into(),
        exit_code: 1,
    })?;
    let ideal = SampledWaveform {
        dt,
        samples,
        parameterization: Parameterization::CouplerFrequency,
    };
    let baseline = ideal.samples[0];
    let pre = predistort_about(&model, &ideal, baseline)?;
    let delivered = apply_distortion_about(&model, &pre, baseline);
    let scale = ideal
        .samples
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let err = ideal
        .samples
        .iter()
        .zip(&delivered.samples)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        / scale;
    let report = PredistortReport {
        samples: ideal.samples.len(),
        dt_ns: dt,
        baseline,
        round_trip_relative_error: err,
    };
    Ok((pre, delivered, report))
}

pub fn cmd_predistort(inv: &Invocation, waveform: &Path) -> Result<Summary, CliError> {
    let cfg = &inv.config;
    let (dt, samples) = read_waveform_csv(waveform)?;
    let dt = dt.unwrap_or(cfg.solver.dt_ns);
    let ideal = samples.clone();
    let (pre, delivered, report) = predistort_samples(cfg, dt, samples)?;
    let mut out = inv.outputs("predistort")?;
    let rows: Vec<Vec<f64>> = (0..ideal.len())
        .map(|k| {
            vec![
                k as f64 * dt,
                ideal[k],
                pre.samples[k],
                delivered.samples[k],
            ]
        })
        .collect();
    out.csv(
        "predistorted.csv",
        &["t_ns", "ideal", "predistorted", "delivered"],
        &rows,
    )?;
    out.json("predistort_report.json", &report)?;
    Ok(finish(
        out,
        serde_json::json!({ "round_trip_relative_error": report.round_trip_relative_error }),
    ))
}

pub fn cmd_compensate(inv: &Invocation) -> Result<Summary, CliError> {
    let cfg = &inv.config;
    let ctx = figures::context(cfg)?;
    let rows = figures::compensation_study(&ctx, cfg)?;
    let mut out = inv.outputs("compensate")?;
    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            vec![
                r.coupler_ghz,
                r.coupler_flux,
                r.shift_q1,
                r.shift_q2,
                r.offset_q1,
                r.offset_q2,
                r.residual_q1,
                r.residual_q2,
            ]
        })
        .collect();
    out.csv(
        "fig3_compensation.csv",
        &[
            "coupler_ghz",
            "coupler_flux",
            "shift_q1_ghz",
            "shift_q2_ghz",
            "offset_q1_ghz",
            "offset_q2_ghz",
            "residual_q1_ghz",
            "residual_q2_ghz",
        ],
        &table,
    )?;
    out.json("fig3_compensation.json", &rows)?;
    Ok(finish(
        out,
        serde_json::json!({ "points": rows.len(), "zero_coupling_ghz": ctx.zero_point }),
    ))
}

/// Writes the ideal waveforms of the three families at the configured pulse settings.
pub fn cmd_waveforms(inv: &Invocation) -> Result<Summary, CliError> {
    let cfg = &inv.config;
    let mut out = inv.outputs("waveforms")?;
    for family in [
        PulseFamily::Square,
        PulseFamily::Slepian,
        PulseFamily::Cosine,
    ] {
        let wf = figures::ideal_waveform(cfg, family)?;
        let rows: Vec<Vec<f64>> = wf.iter().map(|p| vec![p[0], p[1]]).collect();
        out.csv(
            &format!("waveform_{}.csv", family.name()),
            &["t_ns", "value"],
            &rows,
        )?;
    }
    Ok(finish(out, serde_json::json!({})))
}

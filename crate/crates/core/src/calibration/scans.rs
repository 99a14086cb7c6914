// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use crate::gate::{GateContext, GateSpec};
use crate::metrics::{conditional_phase, leakage_from_11, project_computational};
use crate::propagator::{PropagationResult, PropagatorOptions};
use crate::units::{wrap_deg_180, wrap_deg_360};
use crate::{Error, Result};

/// Index-ordered map over independent grid points. Implementations may run
/// points in parallel but must return results in index order.
pub trait GridMap {
    fn map<T: Send, F: Fn(usize) -> T + Sync + Send>(&self, n: usize, f: F) -> Vec<T>;
}

/// Evaluates points one after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct SequentialMap;

impl GridMap for SequentialMap {
    fn map<T: Send, F: Fn(usize) -> T + Sync + Send>(&self, n: usize, f: F) -> Vec<T> {
        (0..n).map(f).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanGrid {
    /// Peak values in the pulse's parameterisation (g_eff or coupler GHz).
    pub coupling_axis: Vec<f64>,
    /// Peak Q2 detune offsets, GHz.
    pub detune_axis: Vec<f64>,
    /// Gate repetitions; 2-D scans use the first entry.
    pub gate_count_axis: Vec<u32>,
}

fn strictly_monotone(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0]) || v.windows(2).all(|w| w[1] < w[0])
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        if self.coupling_axis.is_empty()
            || self.detune_axis.is_empty()
            || self.gate_count_axis.is_empty()
        {
            return Err(Error::InvalidInput("scan axes must be non-empty".into()));
        }
        let counts: Vec<f64> = self.gate_count_axis.iter().map(|&n| n as f64).collect();
        if !strictly_monotone(&self.coupling_axis)
            || !strictly_monotone(&self.detune_axis)
            || !strictly_monotone(&counts)
        {
            return Err(Error::InvalidInput(
                "scan axes must be strictly monotone".into(),
            ));
        }
        if self.gate_count_axis.contains(&0) {
            return Err(Error::InvalidInput("gate counts must be >= 1".into()));
        }
        Ok(())
    }

    /// `n` points centred on `centre` with spacing `step`.
    pub fn centred_axis(centre: f64, step: f64, n: usize) -> Vec<f64> {
        let mid = (n as f64 - 1.0) / 2.0;
        (0..n).map(|k| centre + step * (k as f64 - mid)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ScanKind {
    /// Population lost from |101>.
    Leakage,
    /// Conditional phase in degrees on [0, 360).
    PhaseDeg,
    /// phi(U^N) - N * 180 in degrees on (-180, 180].
    PhaseDeviationDeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ScanAxis {
    Coupling,
    Detune,
    GateCount,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanResult {
    pub grid: ScanGrid,
    pub kind: ScanKind,
    pub row_axis: ScanAxis,
    pub col_axis: ScanAxis,
    /// values[row][col].
    pub values: Vec<Vec<f64>>,
}

impl ScanResult {
    pub fn axis_values(&self, axis: ScanAxis) -> Vec<f64> {
        match axis {
            ScanAxis::Coupling => self.grid.coupling_axis.clone(),
            ScanAxis::Detune => self.grid.detune_axis.clone(),
            ScanAxis::GateCount => self
                .grid
                .gate_count_axis
                .iter()
                .map(|&n| n as f64)
                .collect(),
        }
    }
}

fn at(gate: &GateSpec, peak: f64, detune: f64) -> GateSpec {
    let mut g = gate.clone();
    g.pulse.peak_value = peak;
    g.q2_detune = detune;
    g
}

fn point_values(result: &PropagationResult) -> Result<(f64, f64)> {
    let leak = leakage_from_11(result)?.total;
    let phase = conditional_phase(&project_computational(result)?)
        .map(|p| wrap_deg_360(p.to_degrees()))
        .unwrap_or(f64::NAN);
    Ok((leak, phase))
}

/// Leakage and conditional phase over (detune rows) x (coupling columns).
pub fn coupling_detune_scan<M: GridMap>(
    ctx: &GateContext,
    grid: &ScanGrid,
    gate: &GateSpec,
    mapper: &M,
) -> Result<(ScanResult, ScanResult)> {
    grid.validate()?;
    let n_rep = grid.gate_count_axis[0];
    let nc = grid.coupling_axis.len();
    let opts = PropagatorOptions::computational();
    let pts = mapper.map(grid.detune_axis.len() * nc, |k| {
        let (i, j) = (k / nc, k % nc);
        let g = at(gate, grid.coupling_axis[j], grid.detune_axis[i]);
        ctx.propagate(&g, &opts)
            .and_then(|r| point_values(&r.power(n_rep)))
    });
    let pts = pts.into_iter().collect::<Result<Vec<_>>>()?;
    let shape = |f: &dyn Fn(&(f64, f64)) -> f64| {
        pts.chunks(nc)
            .map(|row| row.iter().map(f).collect())
            .collect()
    };
    let mk = |kind, values| ScanResult {
        grid: grid.clone(),
        kind,
        row_axis: ScanAxis::Detune,
        col_axis: ScanAxis::Coupling,
        values,
    };
    Ok((
        mk(ScanKind::Leakage, shape(&|p| p.0)),
        mk(ScanKind::PhaseDeg, shape(&|p| p.1)),
    ))
}

pub fn leakage_scan<M: GridMap>(
    ctx: &GateContext,
    grid: &ScanGrid,
    gate: &GateSpec,
    mapper: &M,
) -> Result<ScanResult> {
    Ok(coupling_detune_scan(ctx, grid, gate, mapper)?.0)
}

pub fn phase_scan<M: GridMap>(
    ctx: &GateContext,
    grid: &ScanGrid,
    gate: &GateSpec,
    mapper: &M,
) -> Result<ScanResult> {
    Ok(coupling_detune_scan(ctx, grid, gate, mapper)?.1)
}

/// Which pulse parameter varies along the columns of a repeated-gate scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RepeatAxis {
    Coupling,
    Detune,
}

/// U^N over (gate count rows) x (axis columns). The axis not scanned stays
/// at the gate's value. `injected_phase` (rad) multiplies dressed |101> once
/// per gate, a controlled conditional-phase error.
pub fn repeated_gate_scan<M: GridMap>(
    ctx: &GateContext,
    gate: &GateSpec,
    n_list: &[u32],
    axis: RepeatAxis,
    values: &[f64],
    injected_phase: f64,
    mapper: &M,
) -> Result<(ScanResult, ScanResult)> {
    let grid = match axis {
        RepeatAxis::Coupling => ScanGrid {
            coupling_axis: values.to_vec(),
            detune_axis: alloc::vec![gate.q2_detune],
            gate_count_axis: n_list.to_vec(),
        },
        RepeatAxis::Detune => ScanGrid {
            coupling_axis: alloc::vec![gate.pulse.peak_value],
            detune_axis: values.to_vec(),
            gate_count_axis: n_list.to_vec(),
        },
    };
    grid.validate()?;
    let opts = PropagatorOptions::computational();
    let singles = mapper.map(values.len(), |j| {
        let g = match axis {
            RepeatAxis::Coupling => at(gate, values[j], gate.q2_detune),
            RepeatAxis::Detune => at(gate, gate.pulse.peak_value, values[j]),
        };
        let r = ctx.propagate(&g, &opts)?;
        if injected_phase != 0.0 {
            r.with_dressed_phase([1, 0, 1], injected_phase)
        } else {
            Ok(r)
        }
    });
    let singles = singles.into_iter().collect::<Result<Vec<_>>>()?;
    let mut leak = Vec::with_capacity(n_list.len());
    let mut dev = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut lrow = Vec::with_capacity(values.len());
        let mut drow = Vec::with_capacity(values.len());
        for r in &singles {
            let (l, p) = point_values(&r.power(n))?;
            lrow.push(l);
            drow.push(wrap_deg_180(p - 180.0 * n as f64));
        }
        leak.push(lrow);
        dev.push(drow);
    }
    let col_axis = match axis {
        RepeatAxis::Coupling => ScanAxis::Coupling,
        RepeatAxis::Detune => ScanAxis::Detune,
    };
    let mk = |kind, values| ScanResult {
        grid: grid.clone(),
        kind,
        row_axis: ScanAxis::GateCount,
        col_axis,
        values,
    };
    Ok((
        mk(ScanKind::Leakage, leak),
        mk(ScanKind::PhaseDeviationDeg, dev),
    ))
}

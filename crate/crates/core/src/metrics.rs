// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Computational-subspace projection, virtual-Z fitting, fidelity, leakage
//! and conditional phase.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::device::Label;
use crate::linalg::CMatrix;
use crate::propagator::PropagationResult;
use crate::simplex::{initial_simplex, nelder_mead_minimize, Tolerances};
use crate::units::wrap_pi;
use crate::{Error, Result};

/// |00>, |01>, |10>, |11> as (Q1, C, Q2) labels with the coupler in its ground state.
pub const COMPUTATIONAL: [Label; 4] = [[0, 0, 0], [0, 0, 1], [1, 0, 0], [1, 0, 1]];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VirtualZAngles {
    pub delta_plus: f64,
    pub delta_minus: f64,
}

impl VirtualZAngles {
    pub fn new(delta_plus: f64, delta_minus: f64) -> Self {
        VirtualZAngles {
            delta_plus: wrap_pi(delta_plus),
            delta_minus: wrap_pi(delta_minus),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-qubit Z phases of the target: diag(1, e^{i(D+ + D-)}, e^{i(D+ - D-)}, e^{2 i D+}).
pub fn z_phases(a: VirtualZAngles) -> [Complex64; 4] {
    let (p, m) = (a.delta_plus, a.delta_minus);
    [
        c(1.0, 0.0),
        Complex64::from_polar(1.0, p + m),
        Complex64::from_polar(1.0, p - m),
        Complex64::from_polar(1.0, 2.0 * p),
    ]
}

/// diag(1, e^{i(D+ + D-)}, e^{i(D+ - D-)}, e^{i(2 D+ - pi)}).
pub fn cz_target(a: VirtualZAngles) -> CMatrix {
    let z = z_phases(a);
    let mut t = CMatrix::zeros(4, 4);
    for k in 0..4 {
        t[(k, k)] = if k == 3 { -z[k] } else { z[k] };
    }
    t
}

pub fn canonical_cz() -> CMatrix {
    cz_target(VirtualZAngles::default())
}

/// <dressed i| U |dressed j> over the computational labels.
pub fn project_computational(result: &PropagationResult) -> Result<CMatrix> {
    result.dressed_matrix(&COMPUTATIONAL)
}

/// (Tr(M^H M) + |Tr(T^H M)|^2) / (d (d + 1)) for d = 4.
pub fn average_gate_fidelity(m: &CMatrix, target: &CMatrix) -> f64 {
    let d = m.nrows() as f64;
    let tr_mm: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    let mut overlap = c(0.0, 0.0);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            overlap += target[(i, j)].conj() * m[(i, j)];
        }
    }
    (tr_mm + overlap.norm_sqr()) / (d * (d + 1.0))
}

/// 1 - Tr(M^H M) / d.
pub fn subspace_trace_loss(m: &CMatrix) -> f64 {
    1.0 - m.iter().map(|z| z.norm_sqr()).sum::<f64>() / m.nrows() as f64
}

/// Best CZ-with-virtual-Z fidelity. Multi-start simplex from the phase
/// guesses and their pi shifts.
pub fn fit_virtual_z(m: &CMatrix) -> (VirtualZAngles, f64) {
    let ph0 = m[(0, 0)].arg();
    let a1 = m[(1, 1)].arg() - ph0;
    let a2 = m[(2, 2)].arg() - ph0;
    let guess = [0.5 * (a1 + a2), 0.5 * (a1 - a2)];
    let objective = |x: &[f64]| {
        1.0 - average_gate_fidelity(
            m,
            &cz_target(VirtualZAngles {
                delta_plus: x[0],
                delta_minus: x[1],
            }),
        )
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (sp, sm) in [(0.0, 0.0), (PI, 0.0), (0.0, PI), (PI, PI)] {
        let x0 = [guess[0] + sp, guess[1] + sm];
        let r = nelder_mead_minimize(
            objective,
            initial_simplex(&x0, &[0.1, 0.1]),
            Tolerances::default(),
        );
        if best.as_ref().map_or(true, |b| r.value < b.1) {
            best = Some((r.point, r.value));
        }
    }
    let (x, v) = best.expect("four starts");
    (VirtualZAngles::new(x[0], x[1]), 1.0 - v)
}

/// Leakage out of the computational subspace starting from dressed |101>.
#[derive(Debug, Clone, PartialEq)]
pub struct Leakage {
    pub total: f64,
    /// Populations of dressed |2, i, 0> for the i present in the truncation.
    pub per_level: Vec<(Label, f64)>,
}

pub fn leakage_from_11(result: &PropagationResult) -> Result<Leakage> {
    let start = COMPUTATIONAL[3];
    let mut kept = 0.0;
    for l in COMPUTATIONAL {
        kept += result.dressed_element(l, start)?.norm_sqr();
    }
    let mut per_level = Vec::new();
    for i in 0..3 {
        let l = [2, i, 0];
        if l[1] >= result.levels[1] || result.levels[0] < 3 {
            continue;
        }
        let p = if result.basis.eigen_index(l).is_some() {
            result.dressed_element(l, start)?.norm_sqr()
        } else {
            0.0
        };
        per_level.push((l, p));
    }
    Ok(Leakage {
        total: (1.0 - kept).clamp(0.0, 1.0),
        per_level,
    })
}

/// arg M00 - arg M11 - arg M22 + arg M33 (diagonal in |00>,|01>,|10>,|11> order), wrapped to (-pi, pi].
pub fn conditional_phase(m: &CMatrix) -> Result<f64> {
    let min_diag = (0..4)
        .map(|k| m[(k, k)].norm())
        .fold(f64::INFINITY, f64::min);
    if !(min_diag > 0.1) {
        return Err(Error::NotPhaseLike {
            min_diagonal: min_diag,
        });
    }
    let z = m[(0, 0)] * m[(1, 1)].conj() * m[(2, 2)].conj() * m[(3, 3)];
    Ok(wrap_pi(z.arg()))
}

/// Remove fitted virtual-Z phases and return the closest unitary (polar factor).
pub fn corrected_unitary(m: &CMatrix, angles: VirtualZAngles) -> CMatrix {
    let z = z_phases(angles);
    let mut fixed = m.clone();
    for i in 0..4 {
        for j in 0..4 {
            fixed[(i, j)] = z[i].conj() * m[(i, j)];
        }
    }
    let svd = fixed.svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    u * v_t
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    pub projected_map: CMatrix,
    pub fitted_angles: VirtualZAngles,
    pub fidelity: f64,
    pub leakage_from_11: f64,
    pub leakage_levels: Vec<(Label, f64)>,
    /// Radians in (-pi, pi]; NaN when the map is not phase-like.
    pub conditional_phase: f64,
    pub subspace_trace_loss: f64,
    pub unitarity_defect: f64,
}

impl GateReport {
    /// Conditional phase in degrees on [0, 360).
    pub fn conditional_phase_deg(&self) -> f64 {
        crate::units::wrap_deg_360(self.conditional_phase.to_degrees())
    }
}

pub fn gate_report(result: &PropagationResult) -> Result<GateReport> {
    let m = project_computational(result)?;
    let (angles, fidelity) = fit_virtual_z(&m);
    let leak = leakage_from_11(result)?;
    let phase = conditional_phase(&m).unwrap_or(f64::NAN);
    Ok(GateReport {
        subspace_trace_loss: subspace_trace_loss(&m),
        projected_map: m,
        fitted_angles: angles,
        fidelity,
        leakage_from_11: leak.total,
        leakage_levels: leak.per_level,
        conditional_phase: phase,
        unitarity_defect: result.unitarity_defect,
    })
}

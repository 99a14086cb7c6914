// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Time-ordered propagation of the three-mode Hamiltonian.
//!
//! Work is done per excitation sector. Controls are interpolated between
//! samples with a monotone cubic, and each step uses the fourth-order Magnus
//! expansion on two Gauss-Legendre nodes (or a single midpoint exponential).
//! The result is reported in the frame of the idle Hamiltonian:
//! U = exp(i H_idle T) U_lab, so an idle schedule returns the identity.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)] // std supplies these inherently under test
use num_traits::Float;

use crate::device::{
    dressed_basis, label_index, sorted_eigen, DressedBasis, HamiltonianTerms, Label,
};
use crate::linalg::{expm, fixed, unitarity_defect, CMatrix, Pchip};
use crate::pulse::{Parameterization, SampledWaveform};
use crate::units::TWO_PI;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Integrator {
    /// Fourth-order Magnus, two Gauss-Legendre nodes per step.
    #[default]
    Magnus4,
    /// exp(-i H(t + dt/2) dt), second order.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorOptions {
    pub integrator: Integrator,
    /// Propagate only sectors with at most this many excitations.
    pub max_excitation: Option<usize>,
    /// Largest accepted dt times the frame-centred spectral radius (rad).
    pub max_step_phase: f64,
    /// Integration steps per sample interval; the control curve is unchanged.
    pub substeps: usize,
}

impl Default for PropagatorOptions {
    fn default() -> Self {
        PropagatorOptions {
            integrator: Integrator::Magnus4,
            max_excitation: None,
            max_step_phase: 0.5,
            substeps: 1,
        }
    }
}

impl PropagatorOptions {
    /// Sectors 0..=2 hold every state reachable from the computational subspace.
    pub fn computational() -> Self {
        PropagatorOptions {
            max_excitation: Some(2),
            ..Default::default()
        }
    }
}

/// Absolute coupler frequency plus optional bare-frequency offsets of Q1 and Q2.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    pub coupler_trajectory: SampledWaveform,
    pub qubit_offsets: [Option<SampledWaveform>; 2],
}

impl ControlSchedule {
    pub fn new(coupler_trajectory: SampledWaveform) -> Self {
        ControlSchedule {
            coupler_trajectory,
            qubit_offsets: [None, None],
        }
    }

    pub fn total_length(&self) -> f64 {
        self.coupler_trajectory.duration()
    }

    pub fn dt(&self) -> f64 {
        self.coupler_trajectory.dt
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.coupler_trajectory;
        if c.parameterization != Parameterization::CouplerFrequency {
            return Err(Error::InvalidInput(
                "coupler trajectory must be coupler frequencies".into(),
            ));
        }
        if !(c.dt > 0.0) {
            return Err(Error::InvalidInput("dt must be > 0".into()));
        }
        for w in self.qubit_offsets.iter().flatten() {
            if w.samples.len() != c.samples.len() || (w.dt - c.dt).abs() > 1e-12 * c.dt {
                return Err(Error::InvalidInput(
                    "all waveforms must share dt and sample count".into(),
                ));
            }
        }
        if c.samples
            .iter()
            .chain(
                self.qubit_offsets
                    .iter()
                    .flatten()
                    .flat_map(|w| w.samples.iter()),
            )
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidInput("non-finite control sample".into()));
        }
        Ok(())
    }
}

/// Per-sector propagators in the idle frame, bare product basis.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub levels: [usize; 3],
    pub dimension: usize,
    /// Global bare indices of each propagated sector.
    pub sector_indices: Vec<Vec<usize>>,
    pub blocks: Vec<CMatrix>,
    pub basis: DressedBasis,
    pub unitarity_defect: f64,
    pub duration: f64,
}

impl PropagationResult {
    pub fn max_excitation(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn is_complete(&self) -> bool {
        self.sector_indices.iter().map(|s| s.len()).sum::<usize>() == self.dimension
    }

    /// Full dimension x dimension propagator; only when every sector was propagated.
    pub fn full_matrix(&self) -> Result<CMatrix> {
        if !self.is_complete() {
            return Err(Error::InvalidInput(
                "propagation was restricted to low excitation sectors".into(),
            ));
        }
        let mut u = CMatrix::zeros(self.dimension, self.dimension);
        for (idx, b) in self.sector_indices.iter().zip(&self.blocks) {
            for (r, &gi) in idx.iter().enumerate() {
                for (c, &gj) in idx.iter().enumerate() {
                    u[(gi, gj)] = b[(r, c)];
                }
            }
        }
        Ok(u)
    }

    /// <dressed a| U |dressed b>.
    pub fn dressed_element(&self, a: Label, b: Label) -> Result<Complex64> {
        let sa = self.basis.get(a)?;
        let sb = self.basis.get(b)?;
        if sa.sector != sb.sector {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let blk = &self.blocks[sa.sector];
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, &x) in sa.vector.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            let mut row = Complex64::new(0.0, 0.0);
            for (c, &y) in sb.vector.iter().enumerate() {
                row += blk[(r, c)] * y;
            }
            acc += row * x;
        }
        Ok(acc)
    }

    /// Matrix of dressed elements over a label list.
    pub fn dressed_matrix(&self, labels: &[Label]) -> Result<CMatrix> {
        let n = labels.len();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.dressed_element(labels[i], labels[j])?;
            }
        }
        Ok(m)
    }

    /// U^n, sector by sector.
    pub fn power(&self, n: u32) -> PropagationResult {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut acc = CMatrix::identity(b.nrows(), b.ncols());
                for _ in 0..n {
                    acc = b * &acc;
                }
                acc
            })
            .collect::<Vec<_>>();
        let defect = blocks.iter().map(unitarity_defect).fold(0.0, f64::max);
        PropagationResult {
            blocks,
            unitarity_defect: defect,
            duration: self.duration * n as f64,
            ..self.clone()
        }
    }

    /// Multiply the dressed state `label` by exp(i phi) (a deliberate phase error).
    pub fn with_dressed_phase(&self, label: Label, phi: f64) -> Result<PropagationResult> {
        let st = self.basis.get(label)?;
        let k = st.vector.len();
        let v = DVector::from_iterator(k, st.vector.iter().map(|&x| Complex64::new(x, 0.0)));
        let proj = &v * v.transpose();
        let factor = Complex64::from_polar(1.0, phi) - Complex64::new(1.0, 0.0);
        let corr = CMatrix::identity(k, k) + proj * factor;
        let mut out = self.clone();
        out.blocks[st.sector] = corr * &self.blocks[st.sector];
        Ok(out)
    }
}

struct Controls {
    coupler: Pchip,
    q1: Option<Pchip>,
    q2: Option<Pchip>,
    base: [f64; 3],
}

impl Controls {
    fn new(terms: &HamiltonianTerms, s: &ControlSchedule) -> Self {
        let dt = s.dt();
        let mk = |w: &SampledWaveform| Pchip::uniform(0.0, dt, w.samples.clone());
        Controls {
            coupler: mk(&s.coupler_trajectory),
            q1: s.qubit_offsets[0].as_ref().map(mk),
            q2: s.qubit_offsets[1].as_ref().map(mk),
            base: terms.base_frequencies,
        }
    }

    fn offsets(&self, t: f64) -> [f64; 3] {
        [
            self.q1.as_ref().map_or(0.0, |p| p.eval(t)),
            self.coupler.eval(t) - self.base[1],
            self.q2.as_ref().map_or(0.0, |p| p.eval(t)),
        ]
    }
}

fn offset_corners(terms: &HamiltonianTerms, s: &ControlSchedule) -> ([f64; 3], [f64; 3]) {
    let range = |w: Option<&SampledWaveform>, shift: f64| match w {
        Some(w) => w
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v - shift), hi.max(v - shift))
            }),
        None => (0.0, 0.0),
    };
    let r1 = range(s.qubit_offsets[0].as_ref(), 0.0);
    let rc = range(Some(&s.coupler_trajectory), terms.base_frequencies[1]);
    let r2 = range(s.qubit_offsets[1].as_ref(), 0.0);
    ([r1.0, rc.0, r2.0], [r1.1, rc.1, r2.1])
}

/// Per-sector energy centres (rad/ns) and the largest dt * radius.
fn sector_frame(
    terms: &HamiltonianTerms,
    s: &ControlSchedule,
    top: usize,
    max_phase: f64,
) -> Result<Vec<f64>> {
    let (lo, hi) = offset_corners(terms, s);
    let dt = s.dt();
    let mut centres = Vec::with_capacity(top + 1);
    let mut worst: f64 = 0.0;
    for sector in &terms.sectors[..=top] {
        let (a, _) = sorted_eigen(&sector.hamiltonian(lo));
        let (b, _) = sorted_eigen(&sector.hamiltonian(hi));
        let e_min = a[0];
        let e_max = b[b.len() - 1];
        centres.push(0.5 * (e_min + e_max));
        worst = worst.max(0.5 * (e_max - e_min));
    }
    let phase = dt * worst;
    if phase >= max_phase {
        let recommended = 0.9 * max_phase / worst;
        return Err(Error::StepTooLarge {
            phase_per_step: phase,
            recommended_dt: recommended,
        });
    }
    Ok(centres)
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // sqrt(3)/6

fn generator(
    terms: &HamiltonianTerms,
    sector: usize,
    controls: &Controls,
    centre: f64,
    t0: f64,
    dt: f64,
    integrator: Integrator,
) -> CMatrix {
    let sec = &terms.sectors[sector];
    let k = sec.dim();
    let centred = |t: f64| {
        let mut h = sec.hamiltonian(controls.offsets(t));
        for i in 0..k {
            h[(i, i)] -= centre;
        }
        h
    };
    match integrator {
        Integrator::Midpoint => {
            let h = centred(t0 + 0.5 * dt);
            h.map(|x| Complex64::new(0.0, -dt * x))
        }
        Integrator::Magnus4 => {
            let h1 = centred(t0 + (0.5 - GAUSS_OFFSET) * dt);
            let h2 = centred(t0 + (0.5 + GAUSS_OFFSET) * dt);
            let comm = &h2 * &h1 - &h1 * &h2;
            let c = 3.0f64.sqrt() * dt * dt / 12.0;
            DMatrix::from_fn(k, k, |r, col| {
                Complex64::new(
                    -c * comm[(r, col)],
                    -0.5 * dt * (h1[(r, col)] + h2[(r, col)]),
                )
            })
        }
    }
}

fn evolve_dynamic(
    terms: &HamiltonianTerms,
    s: usize,
    controls: &Controls,
    centre: f64,
    steps: &[(f64, f64)],
    integrator: Integrator,
) -> CMatrix {
    let k = terms.sectors[s].dim();
    let mut u = CMatrix::identity(k, k);
    for &(t0, dt) in steps {
        let omega = generator(terms, s, controls, centre, t0, dt, integrator);
        u = expm(&omega) * u;
    }
    u
}

fn evolve_fixed<const K: usize>(
    terms: &HamiltonianTerms,
    s: usize,
    controls: &Controls,
    centre: f64,
    steps: &[(f64, f64)],
    integrator: Integrator,
) -> CMatrix {
    let sec = &terms.sectors[s];
    let base: [[f64; K]; K] =
        core::array::from_fn(|r| core::array::from_fn(|c| sec.static_block[(r, c)]));
    let occ: [[f64; K]; 3] =
        core::array::from_fn(|m| core::array::from_fn(|k| sec.occupations[m][k]));
    let ham = |t: f64| {
        let off = controls.offsets(t);
        let mut h = base;
        for k in 0..K {
            h[k][k] +=
                TWO_PI * (off[0] * occ[0][k] + off[1] * occ[1][k] + off[2] * occ[2][k]) - centre;
        }
        h
    };
    let mut u = fixed::identity::<K>();
    for &(t0, dt) in steps {
        let c = 3.0f64.sqrt() * dt * dt / 12.0;
        let omega: fixed::Mat<K> = match integrator {
            Integrator::Midpoint => {
                let h = ham(t0 + 0.5 * dt);
                core::array::from_fn(|r| {
                    core::array::from_fn(|col| Complex64::new(0.0, -dt * h[r][col]))
                })
            }
            Integrator::Magnus4 => {
                let h1 = ham(t0 + (0.5 - GAUSS_OFFSET) * dt);
                let h2 = ham(t0 + (0.5 + GAUSS_OFFSET) * dt);
                core::array::from_fn(|r| {
                    core::array::from_fn(|col| {
                        let mut comm = 0.0;
                        for m in 0..K {
                            comm += h2[r][m] * h1[m][col] - h1[r][m] * h2[m][col];
                        }
                        Complex64::new(-c * comm, -0.5 * dt * (h1[r][col] + h2[r][col]))
                    })
                })
            }
        };
        u = fixed::mul(&fixed::expm(&omega), &u);
    }
    CMatrix::from_fn(K, K, |r, col| u[r][col])
}

/// Time-ordered propagator of one sector in the centred lab frame.
fn evolve_sector(
    terms: &HamiltonianTerms,
    s: usize,
    controls: &Controls,
    centre: f64,
    steps: &[(f64, f64)],
    integrator: Integrator,
) -> CMatrix {
    match terms.sectors[s].dim() {
        1 => evolve_fixed::<1>(terms, s, controls, centre, steps, integrator),
        3 => evolve_fixed::<3>(terms, s, controls, centre, steps, integrator),
        6 => evolve_fixed::<6>(terms, s, controls, centre, steps, integrator),
        7 => evolve_fixed::<7>(terms, s, controls, centre, steps, integrator),
        10 => evolve_fixed::<10>(terms, s, controls, centre, steps, integrator),
        _ => evolve_dynamic(terms, s, controls, centre, steps, integrator),
    }
}

/// Largest control phase change (rad) one integration step may see; sample
/// intervals where the controls jump faster are split further.
const MAX_SLEW_PHASE: f64 = 0.05;

/// (start, length) of every integration step: `substeps` per sample
/// interval, more where the controls move quickly.
fn step_plan(schedule: &ControlSchedule, substeps: usize) -> Vec<(f64, f64)> {
    let dt = schedule.dt();
    let n = schedule.coupler_trajectory.samples.len().saturating_sub(1);
    let waves: Vec<&SampledWaveform> = core::iter::once(&schedule.coupler_trajectory)
        .chain(schedule.qubit_offsets.iter().flatten())
        .collect();
    let mut steps = Vec::with_capacity(n * substeps);
    for k in 0..n {
        let jump = waves
            .iter()
            .map(|w| (w.samples[k + 1] - w.samples[k]).abs())
            .fold(0.0, f64::max);
        let refine = ((TWO_PI * jump * dt / MAX_SLEW_PHASE).ceil() as usize).max(1);
        let r = substeps.max(1) * refine;
        let h = dt / r as f64;
        steps.extend((0..r).map(|j| (k as f64 * dt + j as f64 * h, h)));
    }
    steps
}

/// exp(i (H_idle - centre) T) for one sector, from the idle eigenpairs.
fn frame_correction(
    terms: &HamiltonianTerms,
    sector: usize,
    centre: f64,
    duration: f64,
) -> CMatrix {
    let (vals, vecs) = sorted_eigen(&terms.sectors[sector].static_block);
    let k = vals.len();
    let phases: Vec<Complex64> = vals
        .iter()
        .map(|&e| Complex64::from_polar(1.0, (e - centre) * duration))
        .collect();
    DMatrix::from_fn(k, k, |r, c| {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..k {
            acc += phases[m] * (vecs[(r, m)] * vecs[(c, m)]);
        }
        acc
    })
}

fn top_sector(terms: &HamiltonianTerms, opts: &PropagatorOptions) -> usize {
    opts.max_excitation
        .unwrap_or(usize::MAX)
        .min(terms.sectors.len() - 1)
}

pub fn propagate(
    terms: &HamiltonianTerms,
    schedule: &ControlSchedule,
) -> Result<PropagationResult> {
    propagate_with(terms, schedule, &PropagatorOptions::default())
}

pub fn propagate_with(
    terms: &HamiltonianTerms,
    schedule: &ControlSchedule,
    opts: &PropagatorOptions,
) -> Result<PropagationResult> {
    schedule.validate()?;
    let top = top_sector(terms, opts);
    let basis = dressed_basis(terms, [0.0; 3], Some(top))?;
    let sector_indices: Vec<Vec<usize>> = terms.sectors[..=top]
        .iter()
        .map(|s| s.indices.clone())
        .collect();
    let n_steps = schedule.coupler_trajectory.samples.len().saturating_sub(1);
    let duration = schedule.total_length();
    if n_steps == 0 {
        let blocks = sector_indices
            .iter()
            .map(|i| CMatrix::identity(i.len(), i.len()))
            .collect();
        return Ok(PropagationResult {
            levels: terms.levels,
            dimension: terms.dimension,
            sector_indices,
            blocks,
            basis,
            unitarity_defect: 0.0,
            duration: 0.0,
        });
    }
    let centres = sector_frame(terms, schedule, top, opts.max_step_phase)?;
    let controls = Controls::new(terms, schedule);
    let steps = step_plan(schedule, opts.substeps);
    let mut blocks = Vec::with_capacity(top + 1);
    for (s, &centre) in centres.iter().enumerate() {
        let u = evolve_sector(terms, s, &controls, centre, &steps, opts.integrator);
        blocks.push(frame_correction(terms, s, centre, duration) * u);
    }
    let defect = blocks.iter().map(unitarity_defect).fold(0.0, f64::max);
    Ok(PropagationResult {
        levels: terms.levels,
        dimension: terms.dimension,
        sector_indices,
        blocks,
        basis,
        unitarity_defect: defect,
        duration,
    })
}

/// Evolve one state vector (bare basis, full dimension) with the same integrator and frame.
pub fn propagate_state(
    terms: &HamiltonianTerms,
    schedule: &ControlSchedule,
    initial: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    propagate_state_with(terms, schedule, initial, &PropagatorOptions::default())
}

pub fn propagate_state_with(
    terms: &HamiltonianTerms,
    schedule: &ControlSchedule,
    initial: &DVector<Complex64>,
    opts: &PropagatorOptions,
) -> Result<DVector<Complex64>> {
    schedule.validate()?;
    if initial.len() != terms.dimension {
        return Err(Error::InvalidInput("state dimension mismatch".into()));
    }
    let top = top_sector(terms, opts);
    let outside = terms.sectors[top + 1..]
        .iter()
        .flat_map(|s| s.indices.iter())
        .any(|&i| initial[i].norm() > 0.0);
    if outside {
        return Err(Error::InvalidInput(
            "initial state has weight outside the propagated sectors".into(),
        ));
    }
    let n_steps = schedule.coupler_trajectory.samples.len().saturating_sub(1);
    if n_steps == 0 {
        return Ok(initial.clone());
    }
    let centres = sector_frame(terms, schedule, top, opts.max_step_phase)?;
    let controls = Controls::new(terms, schedule);
    let steps = step_plan(schedule, opts.substeps);
    let duration = schedule.total_length();
    let mut out = initial.clone();
    for (s, &centre) in centres.iter().enumerate() {
        let idx = &terms.sectors[s].indices;
        let v = DVector::from_iterator(idx.len(), idx.iter().map(|&i| initial[i]));
        if v.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let u = evolve_sector(terms, s, &controls, centre, &steps, opts.integrator);
        let v = frame_correction(terms, s, centre, duration) * (u * v);
        for (r, &i) in idx.iter().enumerate() {
            out[i] = v[r];
        }
    }
    Ok(out)
}

/// Full-dimension vector of a dressed state.
pub fn dressed_vector(
    terms: &HamiltonianTerms,
    basis: &DressedBasis,
    label: Label,
) -> Result<DVector<Complex64>> {
    let st = basis.get(label)?;
    let mut v = DVector::from_element(terms.dimension, Complex64::new(0.0, 0.0));
    for (r, &i) in terms.sectors[st.sector].indices.iter().enumerate() {
        v[i] = Complex64::new(st.vector[r], 0.0);
    }
    Ok(v)
}

/// Bare basis vector.
pub fn bare_vector(terms: &HamiltonianTerms, label: Label) -> DVector<Complex64> {
    let mut v = DVector::from_element(terms.dimension, Complex64::new(0.0, 0.0));
    v[label_index(terms.levels, label)] = Complex64::new(1.0, 0.0);
    v
}

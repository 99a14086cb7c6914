// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Three-mode Duffing model (Q1, coupler, Q2): Hamiltonian terms, dressed
//! labels, effective qubit-qubit coupling and the flux map.
//!
//! H = sum_i [w_i n_i + (eta_i / 2) b_i^+ b_i^+ b_i b_i] + sum_{i<j} g_ij (b_i^+ b_j + b_j^+ b_i)
//!
//! The exchange coupling conserves the total excitation number, so every
//! matrix here is block diagonal by excitation sector and all work is done
//! per sector.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
#[allow(unused_imports)] // std supplies these inherently under test
use num_traits::Float;

use crate::roots::{brent_min, brent_root};
use crate::units::TWO_PI;
use crate::{Error, Result};

/// Bare product label |n_Q1, n_C, n_Q2>.
pub type Label = [usize; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModeLabel {
    Q1,
    C,
    Q2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeSpec {
    pub label: ModeLabel,
    /// 0->1 frequency, GHz.
    pub frequency: f64,
    /// GHz, negative for transmons.
    pub anharmonicity: f64,
    pub levels: usize,
}

impl ModeSpec {
    pub fn new(label: ModeLabel, frequency: f64, anharmonicity: f64) -> Self {
        ModeSpec {
            label,
            frequency,
            anharmonicity,
            levels: 3,
        }
    }
}

/// Transverse couplings g_ij / 2pi in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CouplingGraph {
    pub g_1c: f64,
    pub g_2c: f64,
    pub g_12: f64,
}

/// Symmetric-SQUID transmon tuning curve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FluxModel {
    pub max_frequency: f64,
    pub anharmonicity: f64,
}

/// w(phi) = (w_max - eta) sqrt|cos(pi phi)| + eta, for |phi| < 1/2.
pub fn flux_to_frequency(model: &FluxModel, flux: f64) -> Result<f64> {
    if !flux.is_finite() || flux.abs() >= 0.5 {
        return Err(Error::InvalidInput(alloc::format!(
            "|flux| = {flux} must be < 0.5"
        )));
    }
    let c = (core::f64::consts::PI * flux).cos().abs();
    Ok((model.max_frequency - model.anharmonicity) * c.sqrt() + model.anharmonicity)
}

/// Non-negative flux (flux quanta) giving `frequency`; inverse of [`flux_to_frequency`].
pub fn frequency_to_flux(model: &FluxModel, frequency: f64) -> Result<f64> {
    let r = (frequency - model.anharmonicity) / (model.max_frequency - model.anharmonicity);
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidInput(alloc::format!(
            "{frequency} GHz is outside the tuning range"
        )));
    }
    Ok((r * r).acos() / core::f64::consts::PI)
}

/// Quantities with no dynamical role, kept with the device for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QubitMetadata {
    pub readout_frequency: f64,
    pub t1_us: f64,
    pub t2_star_us: f64,
    pub chi_qr_mhz: f64,
    pub f00: f64,
    pub f11: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeviceSpec {
    /// Ordered (Q1, C, Q2).
    pub modes: [ModeSpec; 3],
    pub couplings: CouplingGraph,
    pub flux_models: [Option<FluxModel>; 3],
    pub metadata: [Option<QubitMetadata>; 2],
    /// Upper end of the coupler tuning range, GHz.
    pub coupler_max_frequency: f64,
    /// Minimum |w_qubit - w_c| accepted by coupling queries, GHz.
    pub resonance_guard: f64,
    /// Largest Hilbert-space dimension `build_hamiltonian` will accept.
    pub dimension_cap: usize,
}

impl Default for DeviceSpec {
    fn default() -> Self {
        let eta_q = -0.235;
        let eta_c = -0.100;
        DeviceSpec {
            modes: [
                ModeSpec::new(ModeLabel::Q1, 5.077, eta_q),
                ModeSpec::new(ModeLabel::C, 7.0, eta_c),
                ModeSpec::new(ModeLabel::Q2, 4.889, eta_q),
            ],
            couplings: CouplingGraph {
                g_1c: 0.090,
                g_2c: 0.090,
                g_12: 0.006,
            },
            flux_models: [
                Some(FluxModel {
                    max_frequency: 5.299,
                    anharmonicity: eta_q,
                }),
                Some(FluxModel {
                    max_frequency: 7.0,
                    anharmonicity: eta_c,
                }),
                Some(FluxModel {
                    max_frequency: 5.211,
                    anharmonicity: eta_q,
                }),
            ],
            metadata: [
                Some(QubitMetadata {
                    readout_frequency: 6.403,
                    t1_us: 20.56,
                    t2_star_us: 2.52,
                    chi_qr_mhz: 1.05,
                    f00: 0.993,
                    f11: 0.966,
                }),
                Some(QubitMetadata {
                    readout_frequency: 6.477,
                    t1_us: 26.32,
                    t2_star_us: 2.16,
                    chi_qr_mhz: 0.85,
                    f00: 0.996,
                    f11: 0.974,
                }),
            ],
            coupler_max_frequency: 7.0,
            resonance_guard: 0.010,
            dimension_cap: 125,
        }
    }
}

impl DeviceSpec {
    pub fn validate(&self) -> Result<()> {
        let want = [ModeLabel::Q1, ModeLabel::C, ModeLabel::Q2];
        for (m, l) in self.modes.iter().zip(want) {
            if m.label != l {
                return Err(Error::InvalidInput(
                    "modes must be ordered (Q1, C, Q2)".into(),
                ));
            }
            if m.levels < 3 {
                return Err(Error::InvalidInput(alloc::format!(
                    "{:?}: levels must be >= 3",
                    m.label
                )));
            }
            if !(m.frequency.is_finite() && m.frequency > 0.0) {
                return Err(Error::InvalidInput(alloc::format!(
                    "{:?}: frequency must be > 0",
                    m.label
                )));
            }
            if !(m.anharmonicity.is_finite() && m.anharmonicity <= 0.0) {
                return Err(Error::InvalidInput(alloc::format!(
                    "{:?}: anharmonicity must be finite and <= 0",
                    m.label
                )));
            }
        }
        let g = &self.couplings;
        if !(g.g_1c.is_finite() && g.g_2c.is_finite() && g.g_12.is_finite()) {
            return Err(Error::InvalidInput("couplings must be finite".into()));
        }
        if !(self.resonance_guard >= 0.0 && self.coupler_max_frequency.is_finite()) {
            return Err(Error::InvalidInput("bad coupler range or guard".into()));
        }
        Ok(())
    }

    pub fn levels(&self) -> [usize; 3] {
        [
            self.modes[0].levels,
            self.modes[1].levels,
            self.modes[2].levels,
        ]
    }

    pub fn set_levels(&mut self, levels: usize) {
        for m in self.modes.iter_mut() {
            m.levels = levels;
        }
    }

    pub fn with_coupler_frequency(&self, wc: f64) -> DeviceSpec {
        let mut s = self.clone();
        s.modes[1].frequency = wc;
        s
    }

    pub fn qubit_frequencies(&self) -> (f64, f64) {
        (self.modes[0].frequency, self.modes[2].frequency)
    }

    fn check_guard(&self, wc: f64) -> Result<()> {
        for q in [self.modes[0].frequency, self.modes[2].frequency] {
            if (q - wc).abs() < self.resonance_guard {
                return Err(Error::CouplerResonant {
                    coupler: wc,
                    qubit: q,
                });
            }
        }
        Ok(())
    }
}

/// Row-major index of a bare label.
pub fn label_index(levels: [usize; 3], l: Label) -> usize {
    (l[0] * levels[1] + l[1]) * levels[2] + l[2]
}

pub fn index_label(levels: [usize; 3], mut i: usize) -> Label {
    let n2 = i % levels[2];
    i /= levels[2];
    let nc = i % levels[1];
    [i / levels[1], nc, n2]
}

/// One excitation-number block.
#[derive(Debug, Clone)]
pub struct Sector {
    pub excitations: usize,
    /// Global bare indices, ascending.
    pub indices: Vec<usize>,
    /// Static block in rad/ns.
    pub static_block: DMatrix<f64>,
    /// Occupations n_m of each member state, per mode.
    pub occupations: [Vec<f64>; 3],
}

impl Sector {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Block of H with per-mode frequency offsets (GHz), in rad/ns.
    pub fn hamiltonian(&self, offsets: [f64; 3]) -> DMatrix<f64> {
        let mut h = self.static_block.clone();
        for k in 0..self.dim() {
            let shift: f64 = (0..3).map(|m| offsets[m] * self.occupations[m][k]).sum();
            h[(k, k)] += TWO_PI * shift;
        }
        h
    }
}

/// H(t) = static_part + sum_m dw_m(t) control_parts[m], dw in GHz, H in rad/ns.
#[derive(Debug, Clone)]
pub struct HamiltonianTerms {
    pub levels: [usize; 3],
    /// Frequencies (GHz) the offsets are measured from.
    pub base_frequencies: [f64; 3],
    pub dimension: usize,
    pub static_part: DMatrix<f64>,
    pub control_parts: [DMatrix<f64>; 3],
    pub sectors: Vec<Sector>,
}

impl HamiltonianTerms {
    pub fn assemble(&self, offsets: [f64; 3]) -> DMatrix<f64> {
        let mut h = self.static_part.clone();
        for m in 0..3 {
            h += &self.control_parts[m] * offsets[m];
        }
        h
    }

    /// Sector holding the given bare label.
    pub fn sector_of(&self, l: Label) -> usize {
        l[0] + l[1] + l[2]
    }

    /// Position of a bare label inside its sector.
    pub fn position_in_sector(&self, l: Label) -> Option<(usize, usize)> {
        if (0..3).any(|m| l[m] >= self.levels[m]) {
            return None;
        }
        let s = self.sector_of(l);
        let g = label_index(self.levels, l);
        self.sectors[s]
            .indices
            .binary_search(&g)
            .ok()
            .map(|p| (s, p))
    }
}

pub fn build_hamiltonian(spec: &DeviceSpec) -> Result<HamiltonianTerms> {
    spec.validate()?;
    let levels = spec.levels();
    let dim = levels.iter().product::<usize>();
    if dim > spec.dimension_cap {
        return Err(Error::DimensionOverflow {
            dimension: dim,
            cap: spec.dimension_cap,
        });
    }
    let w: [f64; 3] = core::array::from_fn(|m| spec.modes[m].frequency);
    let eta: [f64; 3] = core::array::from_fn(|m| spec.modes[m].anharmonicity);
    let g = spec.couplings;
    let pairs = [(0usize, 1usize, g.g_1c), (2, 1, g.g_2c), (0, 2, g.g_12)];

    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut controls: [DMatrix<f64>; 3] = core::array::from_fn(|_| DMatrix::zeros(dim, dim));
    for i in 0..dim {
        let l = index_label(levels, i);
        let mut e = 0.0;
        for m in 0..3 {
            let n = l[m] as f64;
            e += w[m] * n + 0.5 * eta[m] * n * (n - 1.0);
            controls[m][(i, i)] = TWO_PI * n;
        }
        h[(i, i)] = TWO_PI * e;
        // b_a^+ b_b |l>: lower b, raise a.
        for &(a, b, gab) in &pairs {
            for (src, dst) in [(a, b), (b, a)] {
                if l[dst] == 0 || l[src] + 1 >= levels[src] {
                    continue;
                }
                let mut t = l;
                t[dst] -= 1;
                t[src] += 1;
                let amp = ((l[dst] as f64) * (l[src] as f64 + 1.0)).sqrt();
                let j = label_index(levels, t);
                h[(j, i)] += TWO_PI * gab * amp;
            }
        }
    }

    let max_n = levels.iter().map(|l| l - 1).sum::<usize>();
    let mut sectors = Vec::with_capacity(max_n + 1);
    for n in 0..=max_n {
        let indices: Vec<usize> = (0..dim)
            .filter(|&i| index_label(levels, i).iter().sum::<usize>() == n)
            .collect();
        let k = indices.len();
        let static_block = DMatrix::from_fn(k, k, |r, c| h[(indices[r], indices[c])]);
        let occupations = core::array::from_fn(|m| {
            indices
                .iter()
                .map(|&i| index_label(levels, i)[m] as f64)
                .collect::<Vec<f64>>()
        });
        sectors.push(Sector {
            excitations: n,
            indices,
            static_block,
            occupations,
        });
    }
    Ok(HamiltonianTerms {
        levels,
        base_frequencies: w,
        dimension: dim,
        static_part: h,
        control_parts: controls,
        sectors,
    })
}

/// Eigenpairs of a real symmetric matrix, ascending.
pub fn sorted_eigen(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DressedState {
    pub label: Label,
    pub sector: usize,
    /// Energy in GHz.
    pub energy: f64,
    /// Coefficients over the sector's bare states; the own-label entry is positive.
    pub vector: Vec<f64>,
    /// |<bare label | dressed>|^2.
    pub overlap: f64,
}

/// Maximum-overlap assignment of eigenvectors to bare labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedBasis {
    pub levels: [usize; 3],
    pub states: Vec<DressedState>,
    index: BTreeMap<Label, usize>,
}

impl DressedBasis {
    pub fn get(&self, l: Label) -> Result<&DressedState> {
        self.index
            .get(&l)
            .map(|&k| &self.states[k])
            .ok_or(Error::MissingLabel(l))
    }

    pub fn energy(&self, l: Label) -> Result<f64> {
        self.get(l).map(|s| s.energy)
    }

    /// Index into `states` of the eigenvector carrying a label.
    pub fn eigen_index(&self, l: Label) -> Option<usize> {
        self.index.get(&l).copied()
    }
}

/// Dressed basis of H(offsets) for sectors 0..=max_excitation (all if None).
pub fn dressed_basis(
    terms: &HamiltonianTerms,
    offsets: [f64; 3],
    max_excitation: Option<usize>,
) -> Result<DressedBasis> {
    let top = max_excitation
        .unwrap_or(usize::MAX)
        .min(terms.sectors.len() - 1);
    let mut states = Vec::new();
    let mut index = BTreeMap::new();
    for sector in &terms.sectors[..=top] {
        let (vals, vecs) = sorted_eigen(&sector.hamiltonian(offsets));
        let k = sector.dim();
        let mut claimed = alloc::vec![false; k];
        for (p, &g) in sector.indices.iter().enumerate() {
            let label = index_label(terms.levels, g);
            let mut best = 0usize;
            let mut best_ov = -1.0;
            for c in 0..k {
                let ov = vecs[(p, c)] * vecs[(p, c)];
                if ov > best_ov {
                    best_ov = ov;
                    best = c;
                }
            }
            if best_ov <= 0.5 || claimed[best] {
                return Err(Error::AmbiguousLabel {
                    label,
                    overlap: best_ov,
                });
            }
            claimed[best] = true;
            let sign = if vecs[(p, best)] < 0.0 { -1.0 } else { 1.0 };
            let vector = (0..k).map(|r| sign * vecs[(r, best)]).collect();
            index.insert(label, states.len());
            states.push(DressedState {
                label,
                sector: sector.excitations,
                energy: vals[best] / TWO_PI,
                vector,
                overlap: best_ov,
            });
        }
    }
    Ok(DressedBasis {
        levels: terms.levels,
        states,
        index,
    })
}

/// Single-excitation block in GHz, basis (|100>, |010>, |001>).
pub fn single_excitation_block(w1: f64, wc: f64, w2: f64, g: &CouplingGraph) -> Matrix3<f64> {
    Matrix3::new(w1, g.g_1c, g.g_12, g.g_1c, wc, g.g_2c, g.g_12, g.g_2c, w2)
}

/// Signed half-splitting of the two qubit-like eigenstates of the block.
fn signed_half_splitting(m: Matrix3<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(m);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    // Drop the most coupler-like eigenvector.
    let coupler = *idx
        .iter()
        .max_by(|&&a, &&b| {
            eig.eigenvectors[(1, a)]
                .abs()
                .total_cmp(&eig.eigenvectors[(1, b)].abs())
        })
        .unwrap();
    let qubit: Vec<usize> = idx.iter().copied().filter(|&k| k != coupler).collect();
    let (lo, hi) = (qubit[0], qubit[1]);
    let split = eig.eigenvalues[hi] - eig.eigenvalues[lo];
    let v = eig.eigenvectors.column(lo);
    let sign = if v[0] * v[2] > 0.0 { -1.0 } else { 1.0 };
    (split, sign)
}

/// Effective Q1-Q2 exchange at coupler frequency `wc` (GHz).
///
/// Q1 is swept through resonance with Q2 and g_eff is half of the minimum
/// splitting of the qubit-like pair. The sign is read from the lower
/// eigenvector (symmetric combination lower means negative coupling), which
/// is continuous through the zero.
pub fn effective_coupling(spec: &DeviceSpec, wc: f64) -> Result<f64> {
    spec.check_guard(wc)?;
    if !wc.is_finite() {
        return Err(Error::InvalidInput(
            "coupler frequency must be finite".into(),
        ));
    }
    let g = spec.couplings;
    if g.g_1c == 0.0 || g.g_2c == 0.0 {
        return Ok(g.g_12);
    }
    let w2 = spec.modes[2].frequency;
    let delta = wc - w2;
    let width = (0.25f64)
        .max(4.0 * (g.g_1c * g.g_1c + g.g_2c * g.g_2c) / delta.abs())
        .min(0.5 * delta.abs());
    let split = |d: f64| signed_half_splitting(single_excitation_block(w2 + d, wc, w2, &g)).0;
    let (d_min, s_min) = brent_min(split, -width, width, 1e-10);
    let (_, sign) = signed_half_splitting(single_excitation_block(w2 + d_min, wc, w2, &g));
    Ok(sign * 0.5 * s_min)
}

/// Second-order estimate g_12 + g_1c g_2c (1/D1 + 1/D2) / 2, D_i = w_i - w_c.
pub fn perturbative_coupling(spec: &DeviceSpec, wc: f64) -> f64 {
    let g = spec.couplings;
    let (w1, w2) = spec.qubit_frequencies();
    g.g_12 + 0.5 * g.g_1c * g.g_2c * (1.0 / (w1 - wc) + 1.0 / (w2 - wc))
}

/// Coupler frequency range above both qubits used for root and table searches.
pub fn coupler_branch(spec: &DeviceSpec) -> (f64, f64) {
    let (w1, w2) = spec.qubit_frequencies();
    (
        w1.max(w2) + spec.resonance_guard.max(1e-6) * 1.000001,
        spec.coupler_max_frequency,
    )
}

/// Coupler frequency above both qubits where g_eff vanishes.
pub fn zero_coupling_point(spec: &DeviceSpec) -> Result<f64> {
    spec.validate()?;
    let (lo, hi) = coupler_branch(spec);
    if !(hi > lo) {
        return Err(Error::NoSignChange { lo, hi });
    }
    let f = |w: f64| effective_coupling(spec, w).unwrap_or(f64::NAN);
    let root = brent_root(f, lo, hi, 1e-12)?;
    let g = effective_coupling(spec, root)?;
    if g.abs() >= 1e-6 {
        return Err(Error::NoConvergence(alloc::format!(
            "zero-coupling residual {g:e}"
        )));
    }
    Ok(root)
}

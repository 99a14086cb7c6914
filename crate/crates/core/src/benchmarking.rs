// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Cross-entropy and speckle-purity benchmarking on one or two labelled qubits.
//!
//! Circuits are cycles of random pi/2 rotations, optionally followed by a CZ.
//! Noise enters only at the gate level: global or per-qubit depolarizing once
//! per cycle, then readout confusion on the outcome distribution. A device CZ
//! can stand in for the ideal one to carry coherent control error.

#[allow(unused_imports)] // std supplies these inherently under test
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// The pi/2 gate set. Rotation axes lie in the xy plane at 0, 90, 45 and 135 degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum HalfPi {
    X2,
    Y2,
    W2,
    V2,
}

impl HalfPi {
    pub const ALL: [HalfPi; 4] = [HalfPi::X2, HalfPi::Y2, HalfPi::W2, HalfPi::V2];

    pub fn axis_angle(self) -> f64 {
        use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        match self {
            HalfPi::X2 => 0.0,
            HalfPi::Y2 => FRAC_PI_2,
            HalfPi::W2 => FRAC_PI_4,
            HalfPi::V2 => 3.0 * FRAC_PI_4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HalfPi::X2 => "X/2",
            HalfPi::Y2 => "Y/2",
            HalfPi::W2 => "W/2",
            HalfPi::V2 => "V/2",
        }
    }

    /// (I - i (cos a X + sin a Y)) / sqrt 2.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let a = self.axis_angle();
        let s = FRAC_1_SQRT_2;
        [
            [
                Complex64::new(s, 0.0),
                Complex64::new(-s * a.sin(), -s * a.cos()),
            ],
            [
                Complex64::new(s * a.sin(), -s * a.cos()),
                Complex64::new(s, 0.0),
            ],
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RandomCircuit {
    pub n_qubits: usize,
    pub depth: usize,
    /// layers[cycle][qubit].
    pub layers: Vec<Vec<HalfPi>>,
    pub include_cz: bool,
    pub seed: u64,
}

/// Draws a circuit; no qubit sees the same gate in consecutive cycles.
pub fn generate_circuit(
    n_qubits: usize,
    depth: usize,
    seed: u64,
    include_cz: bool,
) -> Result<RandomCircuit> {
    if !(1..=2).contains(&n_qubits) {
        return Err(Error::InvalidInput("n_qubits must be 1 or 2".into()));
    }
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be >= 1".into()));
    }
    if include_cz && n_qubits != 2 {
        return Err(Error::InvalidInput("CZ cycles need two qubits".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers: Vec<Vec<HalfPi>> = Vec::with_capacity(depth);
    for c in 0..depth {
        let layer = (0..n_qubits)
            .map(|q| match c {
                0 => HalfPi::ALL[rng.random_range(0..4)],
                _ => {
                    let prev = layers[c - 1][q];
                    let others: Vec<HalfPi> =
                        HalfPi::ALL.iter().copied().filter(|&g| g != prev).collect();
                    others[rng.random_range(0..3)]
                }
            })
            .collect();
        layers.push(layer);
    }
    Ok(RandomCircuit {
        n_qubits,
        depth,
        layers,
        include_cz,
        seed,
    })
}

/// Readout fidelities of one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Confusion {
    pub f00: f64,
    pub f11: f64,
}

impl Confusion {
    pub const IDEAL: Confusion = Confusion { f00: 1.0, f11: 1.0 };

    /// Column-stochastic: entry (measured, prepared).
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.f00, 1.0 - self.f11], [1.0 - self.f00, self.f11]]
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.f00) || !(0.0..=1.0).contains(&self.f11) {
            return Err(Error::InvalidInput(
                "readout fidelities must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseSpec {
    /// Global depolarizing probability applied once per cycle.
    pub depolarizing_per_cycle: f64,
    /// Independent depolarizing on each qubit once per cycle.
    pub local_depolarizing_per_cycle: f64,
    /// One entry per qubit; empty means perfect readout.
    pub readout: Vec<Confusion>,
}

impl NoiseSpec {
    pub fn global(p: f64) -> Self {
        NoiseSpec {
            depolarizing_per_cycle: p,
            ..Default::default()
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for p in [
            self.depolarizing_per_cycle,
            self.local_depolarizing_per_cycle,
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInput(
                    "depolarizing probability must lie in [0, 1]".into(),
                ));
            }
        }
        if !self.readout.is_empty() && self.readout.len() != n_qubits {
            return Err(Error::InvalidInput(
                "one readout confusion per qubit".into(),
            ));
        }
        self.readout.iter().try_for_each(Confusion::validate)
    }

    fn confusion_for(&self, n_qubits: usize) -> Vec<Confusion> {
        if self.readout.is_empty() {
            vec![Confusion::IDEAL; n_qubits]
        } else {
            self.readout.clone()
        }
    }
}

/// Kronecker product of per-qubit 2 x 2 matrices; qubit 0 is the high bit.
fn kron_all(ms: &[[[f64; 2]; 2]]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![1.0]];
    for m in ms {
        let d = out.len();
        let mut next = vec![vec![0.0; 2 * d]; 2 * d];
        for i in 0..d {
            for j in 0..d {
                for a in 0..2 {
                    for b in 0..2 {
                        next[2 * i + a][2 * j + b] = out[i][j] * m[a][b];
                    }
                }
            }
        }
        out = next;
    }
    out
}

fn apply_real(m: &[Vec<f64>], p: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(p).map(|(a, b)| a * b).sum())
        .collect()
}

/// Applies per-qubit confusion to an outcome distribution.
pub fn apply_confusion(probs: &[f64], confusion: &[Confusion]) -> Vec<f64> {
    let ms: Vec<_> = confusion.iter().map(Confusion::matrix).collect();
    apply_real(&kron_all(&ms), probs)
}

/// Undoes per-qubit confusion by inverting each 2 x 2 matrix.
pub fn invert_confusion(probs: &[f64], confusion: &[Confusion]) -> Result<Vec<f64>> {
    let mut inv = Vec::with_capacity(confusion.len());
    for c in confusion {
        let m = c.matrix();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-9 {
            return Err(Error::NonInvertible);
        }
        inv.push([
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ]);
    }
    Ok(apply_real(&kron_all(&inv), probs))
}

/// The two-qubit entangler used in every CZ cycle.
#[derive(Debug, Clone, PartialEq)]
pub enum Entangler {
    Ideal,
    /// 4 x 4 matrix in the |Q1 Q2> basis (index 2 n1 + n2).
    Device([[Complex64; 4]; 4]),
}

fn cz_ideal() -> [[Complex64; 4]; 4] {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(if i == 3 { -1.0 } else { 1.0 }, 0.0);
    }
    m
}

impl Entangler {
    fn matrix(&self) -> [[Complex64; 4]; 4] {
        match self {
            Entangler::Ideal => cz_ideal(),
            Entangler::Device(m) => *m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SimulationMode {
    /// Pure-state evolution; global depolarizing is mixed in analytically.
    Statevector,
    #[default]
    Density,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitProbabilities {
    pub ideal: Vec<f64>,
    pub noisy: Vec<f64>,
}

type Dense = Vec<Vec<Complex64>>;

fn zeros(d: usize) -> Dense {
    vec![vec![Complex64::new(0.0, 0.0); d]; d]
}

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let d = a.len();
    let mut out = zeros(d);
    for i in 0..d {
        for k in 0..d {
            let aik = a[i][k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn dagger(a: &Dense) -> Dense {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| a[j][i].conj()).collect())
        .collect()
}

fn layer_unitary(layer: &[HalfPi]) -> Dense {
    let mut u: Dense = vec![vec![Complex64::new(1.0, 0.0)]];
    for g in layer {
        let m = g.matrix();
        let d = u.len();
        let mut next = zeros(2 * d);
        for i in 0..d {
            for j in 0..d {
                for a in 0..2 {
                    for b in 0..2 {
                        next[2 * i + a][2 * j + b] = u[i][j] * m[a][b];
                    }
                }
            }
        }
        u = next;
    }
    u
}

fn cycle_unitaries(circuit: &RandomCircuit, cz: &[[Complex64; 4]; 4]) -> Vec<Dense> {
    let czd: Dense = cz.iter().map(|r| r.to_vec()).collect();
    circuit
        .layers
        .iter()
        .map(|layer| {
            let u = layer_unitary(layer);
            if circuit.include_cz {
                matmul(&czd, &u)
            } else {
                u
            }
        })
        .collect()
}

fn final_state(cycles: &[Dense]) -> Vec<Complex64> {
    let d = cycles[0].len();
    let mut psi = vec![Complex64::new(0.0, 0.0); d];
    psi[0] = Complex64::new(1.0, 0.0);
    for u in cycles {
        psi = u
            .iter()
            .map(|row| row.iter().zip(&psi).map(|(a, b)| a * b).sum())
            .collect();
    }
    psi
}

fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    let (o, z, i) = (
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    match k {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        _ => [[o, z], [z, -o]],
    }
}

/// Pauli P on `qubit` of an `n`-qubit register, as a dense matrix.
fn embedded_pauli(k: usize, qubit: usize, n: usize) -> Dense {
    let mut u: Dense = vec![vec![Complex64::new(1.0, 0.0)]];
    for q in 0..n {
        let m = if q == qubit { pauli(k) } else { pauli(0) };
        let d = u.len();
        let mut next = zeros(2 * d);
        for i in 0..d {
            for j in 0..d {
                for a in 0..2 {
                    for b in 0..2 {
                        next[2 * i + a][2 * j + b] = u[i][j] * m[a][b];
                    }
                }
            }
        }
        u = next;
    }
    u
}

fn density_probabilities(circuit: &RandomCircuit, cycles: &[Dense], noise: &NoiseSpec) -> Vec<f64> {
    let d = cycles[0].len();
    let mut rho = zeros(d);
    rho[0][0] = Complex64::new(1.0, 0.0);
    let paulis: Vec<Vec<Dense>> = (0..circuit.n_qubits)
        .map(|q| {
            (1..4)
                .map(|k| embedded_pauli(k, q, circuit.n_qubits))
                .collect()
        })
        .collect();
    for u in cycles {
        rho = matmul(&matmul(u, &rho), &dagger(u));
        let pl = noise.local_depolarizing_per_cycle;
        if pl > 0.0 {
            for ps in &paulis {
                let mut next: Dense = rho
                    .iter()
                    .map(|r| r.iter().map(|x| x * (1.0 - 0.75 * pl)).collect())
                    .collect();
                for p in ps {
                    let t = matmul(&matmul(p, &rho), p);
                    for i in 0..d {
                        for j in 0..d {
                            next[i][j] += t[i][j] * (0.25 * pl);
                        }
                    }
                }
                rho = next;
            }
        }
        let p = noise.depolarizing_per_cycle;
        if p > 0.0 {
            let tr: f64 = (0..d).map(|i| rho[i][i].re).sum();
            for (i, row) in rho.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    *x *= 1.0 - p;
                    if i == j {
                        *x += p * tr / d as f64;
                    }
                }
            }
        }
    }
    (0..d).map(|i| rho[i][i].re).collect()
}

/// Ideal probabilities from the labelled gates; noisy ones with the supplied
/// entangler, depolarizing and readout confusion.
pub fn simulate_circuit(
    circuit: &RandomCircuit,
    noise: &NoiseSpec,
    mode: SimulationMode,
    entangler: &Entangler,
) -> Result<CircuitProbabilities> {
    noise.validate(circuit.n_qubits)?;
    let ideal_cycles = cycle_unitaries(circuit, &cz_ideal());
    let ideal: Vec<f64> = final_state(&ideal_cycles)
        .iter()
        .map(|a| a.norm_sqr())
        .collect();
    let actual_cycles = match entangler {
        Entangler::Ideal => ideal_cycles,
        e => cycle_unitaries(circuit, &e.matrix()),
    };
    let d = ideal.len();
    let raw = match mode {
        SimulationMode::Statevector if noise.local_depolarizing_per_cycle == 0.0 => {
            let f = (1.0 - noise.depolarizing_per_cycle).powi(circuit.depth as i32);
            final_state(&actual_cycles)
                .iter()
                .map(|a| f * a.norm_sqr() + (1.0 - f) / d as f64)
                .collect()
        }
        _ => density_probabilities(circuit, &actual_cycles, noise),
    };
    let noisy = apply_confusion(&raw, &noise.confusion_for(circuit.n_qubits));
    Ok(CircuitProbabilities { ideal, noisy })
}

/// Draws `shots` outcomes and returns their frequencies.
pub fn sample_frequencies(probs: &[f64], shots: u32, rng: &mut impl Rng) -> Vec<f64> {
    let mut counts = vec![0u32; probs.len()];
    for _ in 0..shots {
        let r: f64 = rng.random();
        let mut acc = 0.0;
        let mut k = probs.len() - 1;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if r < acc {
                k = i;
                break;
            }
        }
        counts[k] += 1;
    }
    counts.iter().map(|&c| c as f64 / shots as f64).collect()
}

fn xeb_terms(ideal: &[f64], measured: &[f64]) -> (f64, f64) {
    let d = ideal.len() as f64;
    let num = d * ideal.iter().zip(measured).map(|(p, q)| p * q).sum::<f64>() - 1.0;
    let den = d * ideal.iter().map(|p| p * p).sum::<f64>() - 1.0;
    (num, den)
}

/// (D sum q p - 1) / (D sum p^2 - 1) for one circuit.
pub fn linear_xeb_fidelity(ideal: &[f64], measured: &[f64]) -> Result<f64> {
    if ideal.len() != measured.len() || ideal.is_empty() {
        return Err(Error::InvalidInput("probability vectors must match".into()));
    }
    let (num, den) = xeb_terms(ideal, measured);
    if den.abs() < 1e-6 {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok(num / den)
}

/// Same estimator with measured outcomes given as sampled bitstring indices.
pub fn linear_xeb_from_samples(ideal: &[f64], samples: &[usize]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let mut q = vec![0.0; ideal.len()];
    for &s in samples {
        if s >= q.len() {
            return Err(Error::InvalidInput("sample index out of range".into()));
        }
        q[s] += 1.0 / samples.len() as f64;
    }
    linear_xeb_fidelity(ideal, &q)
}

/// Ratio-of-sums estimate over a batch of circuits, with its standard error
/// from the spread of per-circuit terms.
pub fn batch_xeb_fidelity(pairs: &[(&[f64], &[f64])]) -> Result<(f64, f64)> {
    if pairs.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let terms: Vec<(f64, f64)> = pairs.iter().map(|(p, q)| xeb_terms(p, q)).collect();
    let n = terms.len() as f64;
    let num = terms.iter().map(|t| t.0).sum::<f64>() / n;
    let den = terms.iter().map(|t| t.1).sum::<f64>() / n;
    if den.abs() < 1e-6 {
        return Err(Error::DegenerateDenominator(den));
    }
    let f = num / den;
    let std = if terms.len() > 1 {
        let var = terms.iter().map(|(a, b)| (a - f * b).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt() / den.abs()
    } else {
        0.0
    };
    Ok((f, std))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    pub amplitude: f64,
    /// Per-cycle decay constant.
    pub alpha: f64,
    pub alpha_std: f64,
    /// (1 - alpha)(D^2 - 1)/D^2.
    pub pauli_error: f64,
    /// (1 - alpha)(D - 1)/D.
    pub average_error: f64,
    /// Set when trailing non-positive points were dropped.
    pub truncated: bool,
    pub points_used: usize,
}

/// Least-squares fit of F(d) = A alpha^d.
pub fn fit_decay(depths: &[f64], fidelities: &[f64], dimension: usize) -> Result<DecayFit> {
    if depths.len() != fidelities.len() {
        return Err(Error::InvalidInput(
            "depths and fidelities differ in length".into(),
        ));
    }
    let mut pts: Vec<(f64, f64)> = depths
        .iter()
        .copied()
        .zip(fidelities.iter().copied())
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let prefix = pts.iter().position(|p| !(p.1 > 0.0)).unwrap_or(pts.len());
    let truncated = prefix < pts.len();
    pts.truncate(prefix);
    if pts.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: pts.len(),
        });
    }
    // Log-linear start.
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx = pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let sxy = pts
        .iter()
        .map(|p| (p.0 - mx) * (p.1.ln() - my))
        .sum::<f64>();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let (mut a, mut alpha) = ((my - slope * mx).exp(), slope.exp());
    let normal = |a: f64, alpha: f64| {
        let (mut j11, mut j12, mut j22, mut g1, mut g2, mut rss) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for &(d, y) in &pts {
            let m = alpha.powf(d);
            let da = m;
            let dl = a * d * alpha.powf(d - 1.0);
            let r = y - a * m;
            j11 += da * da;
            j12 += da * dl;
            j22 += dl * dl;
            g1 += da * r;
            g2 += dl * r;
            rss += r * r;
        }
        (j11, j12, j22, g1, g2, rss)
    };
    for _ in 0..100 {
        let (j11, j12, j22, g1, g2, _) = normal(a, alpha);
        let det = j11 * j22 - j12 * j12;
        if det.abs() < 1e-300 {
            break;
        }
        let da = (j22 * g1 - j12 * g2) / det;
        let dl = (j11 * g2 - j12 * g1) / det;
        a += da;
        alpha += dl;
        if da.abs() < 1e-15 * a.abs().max(1.0) && dl.abs() < 1e-15 {
            break;
        }
    }
    let (j11, j12, j22, _, _, rss) = normal(a, alpha);
    let det = j11 * j22 - j12 * j12;
    let s2 = if pts.len() > 2 { rss / (n - 2.0) } else { 0.0 };
    let alpha_std = if det.abs() > 0.0 {
        (s2 * j11 / det).max(0.0).sqrt()
    } else {
        f64::NAN
    };
    let d = dimension as f64;
    Ok(DecayFit {
        amplitude: a,
        alpha,
        alpha_std,
        pauli_error: (1.0 - alpha) * (d * d - 1.0) / (d * d),
        average_error: (1.0 - alpha) * (d - 1.0) / d,
        truncated,
        points_used: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpeckleEstimate {
    /// Var(q) D^2 (D + 1)/(D - 1): the Porter-Thomas normalisation.
    pub purity_pt: f64,
    /// Var(q)/Var(p) with p the same circuits' ideal probabilities.
    pub purity: f64,
    /// sqrt(purity).
    pub purity_fidelity: f64,
}

fn centred_second_moment(probs: &[Vec<f64>], shots: Option<u32>) -> f64 {
    let mut acc = 0.0;
    let mut count = 0usize;
    for row in probs {
        let d = row.len() as f64;
        for &q in row {
            // Unbiased q^2 under multinomial sampling.
            let q2 = match shots {
                Some(n) if n > 1 => {
                    let n = n as f64;
                    (n * q * q - q) / (n - 1.0)
                }
                _ => q * q,
            };
            acc += q2 - 2.0 * q / d + 1.0 / (d * d);
            count += 1;
        }
    }
    acc / count as f64
}

/// Speckle purity from measured distributions. `ideal` supplies the
/// per-circuit reference variance; `shots` removes multinomial bias.
pub fn speckle_purity(
    measured: &[Vec<f64>],
    ideal: &[Vec<f64>],
    shots: Option<u32>,
) -> Result<SpeckleEstimate> {
    if measured.len() < 10 {
        return Err(Error::TooFewSamples {
            needed: 10,
            got: measured.len(),
        });
    }
    if measured.len() != ideal.len() {
        return Err(Error::InvalidInput(
            "measured and ideal batches differ in size".into(),
        ));
    }
    let d = measured[0].len() as f64;
    if d < 2.0 {
        return Err(Error::InvalidInput("dimension must be >= 2".into()));
    }
    let vq = centred_second_moment(measured, shots);
    let vp = centred_second_moment(ideal, None);
    if vp.abs() < 1e-12 {
        return Err(Error::DegenerateDenominator(vp));
    }
    let purity = vq / vp;
    Ok(SpeckleEstimate {
        purity_pt: vq * d * d * (d + 1.0) / (d - 1.0),
        purity,
        purity_fidelity: purity.max(0.0).sqrt(),
    })
}

/// SPB-normalised purity (D Tr rho^2 - 1)/(D - 1) of a density matrix's
/// output after `depth` cycles of global depolarizing `p`, for a pure input.
pub fn depolarized_purity(p: f64, depth: usize) -> f64 {
    (1.0 - p).powi(2 * depth as i32)
}

/// SplitMix64 step: the per-circuit seed rule.
pub fn split_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub const DEFAULT_DEPTHS: [usize; 8] = [1, 3, 5, 8, 12, 17, 23, 30];

#[derive(Debug, Clone, PartialEq)]
pub struct XebConfig {
    pub n_qubits: usize,
    pub depths: Vec<usize>,
    pub circuits_per_depth: usize,
    pub seed: u64,
    pub noise: NoiseSpec,
    pub entangler: Entangler,
    /// Sampled shots per circuit; `None` uses exact distributions.
    pub shots: Option<u32>,
    /// Apply the inverse readout confusion before estimating.
    pub mitigate_readout: bool,
    pub mode: SimulationMode,
}

impl XebConfig {
    pub fn new(n_qubits: usize) -> Self {
        XebConfig {
            n_qubits,
            depths: DEFAULT_DEPTHS.to_vec(),
            circuits_per_depth: 50,
            seed: 0,
            noise: NoiseSpec::default(),
            entangler: Entangler::Ideal,
            shots: None,
            mitigate_readout: false,
            mode: SimulationMode::Density,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CircuitRecord {
    pub depth: usize,
    pub seed: u64,
    pub ideal: Vec<f64>,
    pub measured: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DepthEstimate {
    pub depth: usize,
    /// NaN where every circuit's ideal distribution is flat.
    pub fidelity: f64,
    pub fidelity_std: f64,
    pub purity: f64,
    pub purity_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct XebRun {
    pub n_qubits: usize,
    pub circuits: usize,
    pub depths: Vec<usize>,
    pub seed: u64,
    pub records: Vec<CircuitRecord>,
    pub estimates: Vec<DepthEstimate>,
    pub fit: DecayFit,
    /// Decay of sqrt(purity) against depth.
    pub purity_fit: DecayFit,
    /// purity-fit alpha minus XEB alpha: the coherent share of the cycle error.
    pub control_error: f64,
}

/// Runs one circuit; exposed so callers can spread circuits over threads.
pub fn run_circuit(cfg: &XebConfig, depth: usize, seed: u64) -> Result<CircuitRecord> {
    let circuit = generate_circuit(cfg.n_qubits, depth, seed, cfg.n_qubits == 2)?;
    let probs = simulate_circuit(&circuit, &cfg.noise, cfg.mode, &cfg.entangler)?;
    let mut measured = match cfg.shots {
        Some(s) => sample_frequencies(
            &probs.noisy,
            s,
            &mut ChaCha8Rng::seed_from_u64(split_seed(seed, 0xdead)),
        ),
        None => probs.noisy,
    };
    if cfg.mitigate_readout && !cfg.noise.readout.is_empty() {
        measured = invert_confusion(&measured, &cfg.noise.readout)?;
    }
    Ok(CircuitRecord {
        depth,
        seed,
        ideal: probs.ideal,
        measured,
    })
}

/// Circuit seeds in evaluation order: (depth, seed) pairs.
pub fn circuit_plan(cfg: &XebConfig) -> Vec<(usize, u64)> {
    let mut out = Vec::with_capacity(cfg.depths.len() * cfg.circuits_per_depth);
    for (i, &d) in cfg.depths.iter().enumerate() {
        for c in 0..cfg.circuits_per_depth {
            out.push((
                d,
                split_seed(cfg.seed, (i * cfg.circuits_per_depth + c) as u64),
            ));
        }
    }
    out
}

/// Aggregates circuit records into per-depth estimates and decay fits.
pub fn summarize(cfg: &XebConfig, records: Vec<CircuitRecord>) -> Result<XebRun> {
    let dim = 1usize << cfg.n_qubits;
    let mut estimates = Vec::with_capacity(cfg.depths.len());
    for &d in &cfg.depths {
        let batch: Vec<&CircuitRecord> = records.iter().filter(|r| r.depth == d).collect();
        let pairs: Vec<(&[f64], &[f64])> = batch
            .iter()
            .map(|r| (r.ideal.as_slice(), r.measured.as_slice()))
            .collect();
        let (fidelity, fidelity_std) = match batch_xeb_fidelity(&pairs) {
            Ok(v) => v,
            Err(Error::DegenerateDenominator(_)) => (f64::NAN, f64::NAN),
            Err(e) => return Err(e),
        };
        let measured: Vec<Vec<f64>> = batch.iter().map(|r| r.measured.clone()).collect();
        let ideal: Vec<Vec<f64>> = batch.iter().map(|r| r.ideal.clone()).collect();
        let (purity, purity_fidelity) = match speckle_purity(&measured, &ideal, cfg.shots) {
            Ok(s) => (s.purity, s.purity_fidelity),
            Err(Error::DegenerateDenominator(_)) => (f64::NAN, f64::NAN),
            Err(e) => return Err(e),
        };
        estimates.push(DepthEstimate {
            depth: d,
            fidelity,
            fidelity_std,
            purity,
            purity_fidelity,
        });
    }
    let usable: Vec<&DepthEstimate> = estimates
        .iter()
        .filter(|e| e.fidelity.is_finite())
        .collect();
    let ds: Vec<f64> = usable.iter().map(|e| e.depth as f64).collect();
    let fit = fit_decay(
        &ds,
        &usable.iter().map(|e| e.fidelity).collect::<Vec<_>>(),
        dim,
    )?;
    let purity_fit = fit_decay(
        &ds,
        &usable.iter().map(|e| e.purity_fidelity).collect::<Vec<_>>(),
        dim,
    )?;
    let control_error = purity_fit.alpha - fit.alpha;
    Ok(XebRun {
        n_qubits: cfg.n_qubits,
        circuits: cfg.circuits_per_depth,
        depths: cfg.depths.clone(),
        seed: cfg.seed,
        records,
        estimates,
        fit,
        purity_fit,
        control_error,
    })
}

/// Generate, simulate, estimate and fit, sequentially.
pub fn cz_xeb_pipeline(cfg: &XebConfig) -> Result<XebRun> {
    if cfg.depths.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: cfg.depths.len(),
        });
    }
    if cfg.circuits_per_depth < 10 {
        return Err(Error::TooFewSamples {
            needed: 10,
            got: cfg.circuits_per_depth,
        });
    }
    let records = circuit_plan(cfg)
        .into_iter()
        .map(|(d, s)| run_circuit(cfg, d, s))
        .collect::<Result<Vec<_>>>()?;
    summarize(cfg, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_pi_squares_to_pi_rotation() {
        for g in HalfPi::ALL {
            let m = g.matrix();
            // R(pi/2)^2 = -i (cos a X + sin a Y): zero diagonal.
            let d00 = m[0][0] * m[0][0] + m[0][1] * m[1][0];
            assert!(d00.norm() < 1e-15, "{}", g.name());
        }
    }

    #[test]
    fn split_seed_differs_per_index() {
        assert_ne!(split_seed(1, 0), split_seed(1, 1));
        assert_eq!(split_seed(7, 3), split_seed(7, 3));
    }
}

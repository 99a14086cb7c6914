// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Ramsey-type conditional-phase measurement on a 4 x 4 gate map.
//!
//! Q2 is put on the equator by a Y/2 pulse, Q1 is left in |0> or flipped to
//! |1>, the gate acts, and an analysis pi/2 pulse about an axis at angle
//! phi closes the fringe. P(Q2 = 1) against phi is fitted with
//! a + b cos(phi) + c sin(phi) by linear least squares.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use num_complex::Complex64;
#[allow(unused_imports)] // std supplies these inherently under test
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::CMatrix;
use crate::units::wrap_pi;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RamseyOptions {
    /// Shots per analysis phase; `None` uses exact probabilities.
    pub shots: Option<u32>,
    /// Number of analysis phases over [0, 2 pi).
    pub phases: usize,
    /// Q2 readout fidelities (f00, f11).
    pub readout: Option<(f64, f64)>,
    pub seed: u64,
}

impl Default for RamseyOptions {
    fn default() -> Self {
        RamseyOptions {
            shots: None,
            phases: 16,
            readout: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyFit {
    /// Fringe phase, rad.
    pub phase: f64,
    /// Peak-to-peak amplitude of the fitted fringe.
    pub contrast: f64,
    /// One-sigma phase uncertainty from shot noise (0 for exact probabilities).
    pub phase_std: f64,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// P(Q2 = 1) after the sequence for control state `control` and analysis angle `phi`.
fn excited_probability(m: &CMatrix, control: usize, phi: f64) -> f64 {
    let s = FRAC_1_SQRT_2;
    // Y/2 on Q2 from |0>: (|0> + |1>)/sqrt 2.
    let mut psi = [c(0.0, 0.0); 4];
    psi[2 * control] = c(s, 0.0);
    psi[2 * control + 1] = c(s, 0.0);
    let mut out = [c(0.0, 0.0); 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i] += m[(i, j)] * psi[j];
        }
    }
    // pi/2 about cos(phi) X + sin(phi) Y on Q2.
    let r = [
        [c(s, 0.0), c(-s * phi.sin(), -s * phi.cos())],
        [c(s * phi.sin(), -s * phi.cos()), c(s, 0.0)],
    ];
    let mut p1 = 0.0;
    for q1 in 0..2 {
        let a0 = out[2 * q1];
        let a1 = out[2 * q1 + 1];
        p1 += (r[1][0] * a0 + r[1][1] * a1).norm_sqr();
    }
    p1
}

/// Fringe phase of Q2 with Q1 prepared in `control` (0 or 1).
pub fn ramsey_phase(m: &CMatrix, control: usize, opts: &RamseyOptions) -> Result<RamseyFit> {
    if control > 1 {
        return Err(Error::InvalidInput("control state must be 0 or 1".into()));
    }
    if opts.phases < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: opts.phases,
        });
    }
    if let Some(s) = opts.shots {
        if s < 100 {
            return Err(Error::TooFewSamples {
                needed: 100,
                got: s as usize,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(
        opts.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(control as u64 + 1)),
    );
    let n = opts.phases;
    let angles: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    let ys: Vec<f64> = angles
        .iter()
        .map(|&phi| {
            let p1 = excited_probability(m, control, phi).clamp(0.0, 1.0);
            let p = match opts.readout {
                Some((f00, f11)) => (1.0 - f00) * (1.0 - p1) + f11 * p1,
                None => p1,
            };
            match opts.shots {
                None => p,
                Some(s) => (0..s).filter(|_| rng.random::<f64>() < p).count() as f64 / s as f64,
            }
        })
        .collect();
    // Equally spaced angles make the normal equations diagonal.
    let b = 2.0 / n as f64
        * ys.iter()
            .zip(&angles)
            .map(|(y, a)| y * a.cos())
            .sum::<f64>();
    let cc = 2.0 / n as f64
        * ys.iter()
            .zip(&angles)
            .map(|(y, a)| y * a.sin())
            .sum::<f64>();
    let amp = (b * b + cc * cc).sqrt();
    let contrast = 2.0 * amp;
    if contrast < 0.1 {
        return Err(Error::LowContrast(contrast));
    }
    let phase_std = match opts.shots {
        None => 0.0,
        Some(s) => {
            let mean = ys.iter().sum::<f64>() / n as f64;
            let var = (mean * (1.0 - mean)).max(1e-12) / s as f64;
            (2.0 * var / n as f64).sqrt() / amp
        }
    };
    Ok(RamseyFit {
        phase: cc.atan2(b),
        contrast,
        phase_std,
    })
}

/// phase(control = 1) - phase(control = 0) wrapped to (-pi, pi], with its uncertainty.
pub fn ramsey_conditional_phase(m: &CMatrix, opts: &RamseyOptions) -> Result<(f64, f64)> {
    let f0 = ramsey_phase(m, 0, opts)?;
    let f1 = ramsey_phase(m, 1, opts)?;
    Ok((
        wrap_pi(f1.phase - f0.phase),
        (f0.phase_std.powi(2) + f1.phase_std.powi(2)).sqrt(),
    ))
}

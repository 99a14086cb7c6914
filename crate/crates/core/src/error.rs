// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Every failure the core can report.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A spec or argument violates a documented invariant.
    InvalidInput(String),
    /// Product of mode levels exceeds the configured cap.
    DimensionOverflow { dimension: usize, cap: usize },
    /// A bare label has no eigenvector with overlap above one half.
    AmbiguousLabel { label: [usize; 3], overlap: f64 },
    /// Dressed label missing from a basis.
    MissingLabel([usize; 3]),
    /// The coupler sits within the guard band of a qubit.
    CouplerResonant { coupler: f64, qubit: f64 },
    /// A bracketing search found no sign change.
    NoSignChange { lo: f64, hi: f64 },
    /// A requested coupling lies outside the attainable range.
    OutOfRange {
        index: usize,
        value: f64,
        min: f64,
        max: f64,
    },
    /// Sample spacing too coarse for the pulse.
    DtTooCoarse { dt: f64, max: f64 },
    /// Time step too large for the generator's spectral radius.
    StepTooLarge {
        phase_per_step: f64,
        recommended_dt: f64,
    },
    /// DC response of a distortion model is singular.
    NonInvertible,
    /// A Newton or bracketing solver did not converge.
    NoConvergence(String),
    /// The gate is not close enough to diagonal for a phase readout.
    NotPhaseLike { min_diagonal: f64 },
    /// A sinusoid fit had too little contrast.
    LowContrast(f64),
    /// Too few circuits or depths for an estimator.
    TooFewSamples { needed: usize, got: usize },
    /// The XEB normalisation is degenerate.
    DegenerateDenominator(f64),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::DimensionOverflow { dimension, cap } => {
                write!(f, "Hilbert-space dimension {dimension} exceeds cap {cap}")
            }
            Error::AmbiguousLabel { label, overlap } => write!(
                f,
                "ambiguous dressed label |{},{},{}> (best overlap {overlap:.3})",
                label[0], label[1], label[2]
            ),
            Error::MissingLabel(l) => {
                write!(f, "missing dressed label |{},{},{}>", l[0], l[1], l[2])
            }
            Error::CouplerResonant { coupler, qubit } => write!(
                f,
                "coupler at {coupler} GHz is within the resonance guard of a qubit at {qubit} GHz"
            ),
            Error::NoSignChange { lo, hi } => write!(f, "no sign change on [{lo}, {hi}]"),
            Error::OutOfRange {
                index,
                value,
                min,
                max,
            } => write!(
                f,
                "sample {index} = {value} outside attainable range [{min}, {max}]"
            ),
            Error::DtTooCoarse { dt, max } => write!(f, "dt = {dt} ns too coarse (max {max} ns)"),
            Error::StepTooLarge {
                phase_per_step,
                recommended_dt,
            } => write!(
                f,
                "step phase {phase_per_step:.3} rad exceeds 0.5; use dt <= {recommended_dt:.4} ns"
            ),
            Error::NonInvertible => write!(f, "distortion model has a singular DC response"),
            Error::NoConvergence(what) => write!(f, "no convergence: {what}"),
            Error::NotPhaseLike { min_diagonal } => {
                write!(
                    f,
                    "gate not phase-like: smallest |diagonal| = {min_diagonal:.3}"
                )
            }
            Error::LowContrast(c) => write!(f, "Ramsey fringe contrast {c:.3} below 0.1"),
            Error::TooFewSamples { needed, got } => {
                write!(f, "need at least {needed} samples, got {got}")
            }
            Error::DegenerateDenominator(v) => write!(f, "degenerate XEB denominator {v:e}"),
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    /// Short machine-readable kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::DimensionOverflow { .. } => "dimension_overflow",
            Error::AmbiguousLabel { .. } => "ambiguous_label",
            Error::MissingLabel(_) => "missing_label",
            Error::CouplerResonant { .. } => "coupler_resonant",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::OutOfRange { .. } => "out_of_range",
            Error::DtTooCoarse { .. } => "dt_too_coarse",
            Error::StepTooLarge { .. } => "step_too_large",
            Error::NonInvertible => "non_invertible",
            Error::NoConvergence(_) => "no_convergence",
            Error::NotPhaseLike { .. } => "not_phase_like",
            Error::LowContrast(_) => "low_contrast",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::DegenerateDenominator(_) => "degenerate_denominator",
        }
    }
}

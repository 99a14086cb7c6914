// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation core for CZ gates between two transmons coupled through a
//! frequency-tunable coupler.
//!
//! Everything here is `no_std` + `alloc`. Frequencies cross the public API in
//! GHz and times in ns; the propagator works internally in rad/ns.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod benchmarking;
pub mod calibration;
pub mod device;
pub mod distortion;
mod error;
pub mod gate;
pub mod linalg;
pub mod metrics;
pub mod propagator;
pub mod pulse;
pub mod roots;
pub mod simplex;
pub mod units;

pub use error::{Error, Result};

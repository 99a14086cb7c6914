// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for czsim: config loading, parallel grid runs and
//! CSV/JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod parallel;

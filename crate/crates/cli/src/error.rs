// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::path::Path;

/// Exit 2 for usage and configuration problems, 1 for failures inside a run.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn usage(message: &str) -> Self {
        CliError {
            kind: "usage".into(),
            message: message.into(),
            exit_code: 2,
        }
    }

    pub fn config_not_found(path: &Path) -> Self {
        CliError {
            kind: "config_not_found".into(),
            message: format!("no such file: {}", path.display()),
            exit_code: 2,
        }
    }

    pub fn config_invalid(message: &str) -> Self {
        CliError {
            kind: "config_invalid".into(),
            message: message.into(),
            exit_code: 2,
        }
    }

    pub fn io(path: &Path, e: &std::io::Error) -> Self {
        CliError {
            kind: "io".into(),
            message: format!("{}: {e}", path.display()),
            exit_code: 1,
        }
    }

    pub fn input(message: &str) -> Self {
        CliError {
            kind: "invalid_input".into(),
            message: message.into(),
            exit_code: 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind, "message": self.message } }).to_string()
    }
}

impl From<czsim_core::Error> for CliError {
    fn from(e: czsim_core::Error) -> Self {
        CliError {
            kind: e.kind().into(),
            message: e.to_string(),
            exit_code: 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

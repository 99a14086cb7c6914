// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Output files. CSV files open with `#` header lines; JSON files wrap their
//! payload as `{"header": ..., "data": ...}`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub toolkit: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub command: String,
}

impl Header {
    pub fn new(command: &str, canonical_config: &str, seed: u64) -> Self {
        Header {
            toolkit: "czsim".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_sha256: sha256_hex(canonical_config.as_bytes()),
            seed,
            command: command.into(),
        }
    }

    fn csv_lines(&self) -> String {
        format!(
            "# toolkit: {} {}\n# config_sha256: {}\n# seed: {}\n# command: {}\n",
            self.toolkit, self.version, self.config_sha256, self.seed, self.command
        )
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Shortest round-trip representation; NaN and infinities spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}

/// Collects files for one command under a single output directory.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    header: Header,
    written: Vec<PathBuf>,
}

impl OutputSet {
    pub fn new(dir: &Path, header: Header) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, &e))?;
        Ok(OutputSet {
            dir: dir.to_path_buf(),
            header,
            written: Vec::new(),
        })
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn put(&mut self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, &e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Rows of numbers under a column header.
    pub fn csv(
        &mut self,
        name: &str,
        columns: &[&str],
        rows: &[Vec<f64>],
    ) -> Result<PathBuf, CliError> {
        let mut body = self.header.csv_lines();
        body.push_str(&columns.join(","));
        body.push('\n');
        for r in rows {
            body.push_str(&r.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(","));
            body.push('\n');
        }
        self.put(name, &body)
    }

    /// A grid: first row holds column-axis values, first column row-axis values.
    pub fn grid_csv(
        &mut self,
        name: &str,
        corner: &str,
        rows: &[f64],
        cols: &[f64],
        values: &[Vec<f64>],
    ) -> Result<PathBuf, CliError> {
        let mut body = self.header.csv_lines();
        body.push_str(corner);
        for c in cols {
            body.push(',');
            body.push_str(&fmt_f64(*c));
        }
        body.push('\n');
        for (r, row) in rows.iter().zip(values) {
            body.push_str(&fmt_f64(*r));
            for v in row {
                body.push(',');
                body.push_str(&fmt_f64(*v));
            }
            body.push('\n');
        }
        self.put(name, &body)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, data: &T) -> Result<PathBuf, CliError> {
        let doc = serde_json::json!({ "header": &self.header, "data": data });
        let body =
            serde_json::to_string_pretty(&doc).map_err(|e| CliError::input(&e.to_string()))? + "\n";
        self.put(name, &body)
    }
}

/// Reads a one- or two-column numeric CSV (time, value or value only), skipping
/// `#` comments and a non-numeric header line. Returns (dt, samples).
pub fn read_waveform_csv(path: &Path) -> Result<(Option<f64>, Vec<f64>), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, &e))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 1 => values.push(v[0]),
            Ok(v) if v.len() == 2 => {
                times.push(v[0]);
                values.push(v[1]);
            }
            Ok(_) => {
                return Err(CliError::input(&format!(
                    "line {}: expected one or two columns",
                    n + 1
                )))
            }
            Err(_) if values.is_empty() => continue,
            Err(_) => return Err(CliError::input(&format!("line {}: not a number", n + 1))),
        }
    }
    if values.len() < 2 {
        return Err(CliError::input("waveform needs at least two samples"));
    }
    let dt = if times.len() == values.len() {
        Some((times[times.len() - 1] - times[0]) / (times.len() - 1) as f64)
    } else {
        None
    };
    Ok((dt, values))
}

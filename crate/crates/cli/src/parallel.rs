// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use czsim_core::calibration::GridMap;
use rayon::prelude::*;

use crate::error::CliError;

/// Runs grid points on a private rayon pool; results come back in index order.
pub struct RayonMap {
    pool: rayon::ThreadPool,
}

impl RayonMap {
    pub fn new(threads: usize) -> Result<Self, CliError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| CliError::input(&format!("thread pool: {e}")))?;
        Ok(RayonMap { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl GridMap for RayonMap {
    fn map<T: Send, F: Fn(usize) -> T + Sync + Send>(&self, n: usize, f: F) -> Vec<T> {
        self.pool
            .install(|| (0..n).into_par_iter().map(f).collect())
    }
}

/// Flag, then CZSIM_THREADS, then the machine's parallelism.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return if n == 0 {
            Err(CliError::usage("--threads must be >= 1"))
        } else {
            Ok(n)
        };
    }
    if let Ok(v) = std::env::var("CZSIM_THREADS") {
        return match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::usage("CZSIM_THREADS must be a positive integer")),
        };
    }
    Ok(std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1))
}

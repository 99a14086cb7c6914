// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use czsim_cli::commands::{self, BenchKind, GateFlags, Invocation, Summary, SweepAxis};
use czsim_cli::config::{schema_json, RunConfig};
use czsim_cli::error::CliError;
use czsim_cli::parallel::resolve_threads;
use czsim_core::pulse::PulseFamily;

#[derive(Parser, Debug)]
#[command(name = "czsim", version, about = "Tunable-coupler CZ gate simulator")]
struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's output_dir.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Worker threads (else CZSIM_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate (and by default calibrate) the configured gate.
    Gate {
        /// square, slepian or cosine.
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        length_ns: Option<f64>,
    },
    /// Parameter sweeps.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
    },
    /// Optimize each pulse family.
    Optimize,
    /// Cross-entropy benchmarking.
    Xeb {
        #[arg(long, default_value_t = 2)]
        qubits: usize,
    },
    /// Speckle purity benchmarking.
    Spb {
        #[arg(long, default_value_t = 2)]
        qubits: usize,
    },
    /// Predistort a waveform for the configured line model.
    Predistort {
        #[arg(long)]
        waveform: PathBuf,
    },
    /// Qubit frequency compensation across the coupler range.
    Compensate,
    /// Ideal waveforms of all families.
    Waveforms,
    /// Print the config JSON schema.
    Schema,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Axis {
    Length,
    CouplingDetune,
    RepeatCoupling,
    RepeatDetune,
}

fn run(cli: Cli) -> Result<Option<Summary>, CliError> {
    if let Command::Schema = cli.command {
        let _ = write!(std::io::stdout(), "{}", schema_json());
        return Ok(None);
    }
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    config.validate()?;
    let inv = Invocation::new(config, cli.output_dir, resolve_threads(cli.threads)?)?;
    let summary = match cli.command {
        Command::Gate { shape, length_ns } => {
            let shape = shape
                .map(|s| PulseFamily::parse(&s).map_err(|e| CliError::usage(&e.to_string())))
                .transpose()?;
            commands::cmd_gate(&inv, GateFlags { shape, length_ns })?
        }
        Command::Sweep { axis } => {
            let axis = match axis {
                Axis::Length => SweepAxis::Length,
                Axis::CouplingDetune => SweepAxis::CouplingDetune,
                Axis::RepeatCoupling => SweepAxis::RepeatCoupling,
                Axis::RepeatDetune => SweepAxis::RepeatDetune,
            };
            commands::cmd_sweep(&inv, axis)?
        }
        Command::Optimize => commands::cmd_optimize(&inv)?,
        Command::Xeb { qubits } => commands::cmd_benchmark(&inv, BenchKind::Xeb, qubits)?,
        Command::Spb { qubits } => commands::cmd_benchmark(&inv, BenchKind::Spb, qubits)?,
        Command::Predistort { waveform } => commands::cmd_predistort(&inv, &waveform)?,
        Command::Compensate => commands::cmd_compensate(&inv)?,
        Command::Waveforms => commands::cmd_waveforms(&inv)?,
        Command::Schema => unreachable!(),
    };
    Ok(Some(summary))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", CliError::usage(e.to_string().trim()).to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(Some(s)) => {
            let _ = writeln!(
                std::io::stdout(),
                "{}",
                serde_json::to_string(&s).unwrap_or_default()
            );
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code as u8)
        }
    }
}

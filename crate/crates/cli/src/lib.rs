//! `tfloc` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a command ran but its check failed (not a
//! frame, reconstruction above tolerance), 2 on error with `error.json`
//! written to the output directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_diagnose, cmd_frame, cmd_reconstruct, cmd_spectrogram, Outcome};
pub use config::RunConfig;
pub use error::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tfloc",
    version,
    about = "Eigenfunction frames from covers of the time-frequency plane"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write |V f|^2 as CSV and as an 8-bit PGM image.
    Spectrogram(SignalArgs),
    /// Build the eigenfunction frame of the configured cover and certify it.
    Frame(CommonArgs),
    /// Reconstruct a signal through the canonical dual frame.
    Reconstruct(ReconstructArgs),
    /// Norm-equivalence constants and the threshold sweep.
    Diagnose(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, overriding the config's `output_dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "TFLOC_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SignalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Signal CSV with header `t,re,im`.
    #[arg(long)]
    pub signal: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub signal: PathBuf,
    /// Directory holding `frame.json` and `atoms.bin` from an earlier `frame` run.
    #[arg(long)]
    pub frame: Option<PathBuf>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrogram(_) => "spectrogram",
            Command::Frame(_) => "frame",
            Command::Reconstruct(_) => "reconstruct",
            Command::Diagnose(_) => "diagnose",
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Spectrogram(a) => &a.common,
            Command::Frame(a) | Command::Diagnose(a) => a,
            Command::Reconstruct(a) => &a.common,
        }
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String, tfloc::Error> {
    std::fs::read_to_string(path).map_err(|e| tfloc::Error::io(path, e))
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>, tfloc::Error> {
    std::fs::read(path).map_err(|e| tfloc::Error::io(path, e))
}

fn dispatch(command: &Command, config: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    match command {
        Command::Spectrogram(a) => cmd_spectrogram(config, &a.signal, out),
        Command::Frame(_) => cmd_frame(config, out),
        Command::Reconstruct(a) => cmd_reconstruct(config, &a.signal, a.frame.as_deref(), out),
        Command::Diagnose(_) => cmd_diagnose(config, out),
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let name = cli.command.name();
    let common = cli.command.common();
    let fail = |e: CliError, out: Option<&Path>| {
        eprintln!("tfloc {name}: {e}");
        if let Some(dir) = out {
            if let Err(io) = e.write(name, dir) {
                eprintln!("tfloc {name}: could not write error.json: {io}");
            }
        }
        EXIT_ERROR
    };
    let config = match RunConfig::load(&common.config) {
        Ok(c) => c,
        Err(e) => return fail(e.into(), common.out.as_deref()),
    };
    let out = common
        .out
        .clone()
        .unwrap_or_else(|| config.output_dir.clone());
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            return fail(
                tfloc::Error::InvalidArgument(e.to_string()).into(),
                Some(&out),
            )
        }
    };
    match pool.install(|| dispatch(&cli.command, &config, &out)) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            if outcome.ok {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => fail(e, Some(&out)),
    }
}

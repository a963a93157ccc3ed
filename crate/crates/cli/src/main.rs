// Licensed under the Apache-2.0 license

//! `rotsim`: run offload benchmarks, sweeps and boot scenarios on the
//! simulated root-of-trust.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rotsim_core::{Algorithm, ArchVariant, BootMode, Location};

mod cmd;
mod config;
mod output;

#[derive(Debug, Parser)]
#[clap(name = "rotsim", version, about = "Root-of-trust crypto offload simulator")]
struct Cli {
    #[clap(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ViewFormat {
    Table,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one benchmark and emit its report
    Run {
        #[clap(long)]
        alg: Algorithm,
        /// Payload size in bytes
        #[clap(long)]
        size: u64,
        #[clap(long, default_value = "l1")]
        mem: Location,
        #[clap(long, default_value = "extended")]
        arch: ArchVariant,
        /// Workload seed
        #[clap(long)]
        seed: Option<u64>,
        /// Output file, stdout when absent
        #[clap(long)]
        out: Option<PathBuf>,
        #[clap(long, value_enum, default_value = "json")]
        format: ReportFormat,
    },
    /// Run every spec of a TOML sweep file, or the reference grid
    Sweep {
        /// Sweep file
        config: Option<PathBuf>,
        /// Run the reference grid (also the default with no file)
        #[clap(long)]
        reference_grid: bool,
        #[clap(long)]
        out: Option<PathBuf>,
        #[clap(long, value_enum, default_value = "json")]
        format: ReportFormat,
        /// Also write the speedup summary as CSV
        #[clap(long)]
        summary: Option<PathBuf>,
    },
    /// Boot the SoC and print the stage log
    Boot {
        #[clap(long)]
        mode: BootMode,
        /// OTFL image delivered over SPI (secure) or referenced as @image by the script
        #[clap(long)]
        image: Option<PathBuf>,
        /// JTAG script (debug, hybrid)
        #[clap(long)]
        script: Option<PathBuf>,
        /// Print the outcome as JSON
        #[clap(long)]
        json: bool,
    },
    /// Pack a body into a signed OTFL flash image
    PackImage {
        #[clap(long)]
        body: PathBuf,
        #[clap(long, value_parser = parse_addr)]
        entry: u64,
        /// 32 raw bytes or 64 hex characters
        #[clap(long)]
        key: PathBuf,
        #[clap(long)]
        out: PathBuf,
    },
    /// Render saved reports
    Report {
        /// JSON report, JSON array of reports, or CSV
        #[clap(long = "in")]
        input: PathBuf,
        #[clap(long, value_enum, default_value = "table")]
        format: ViewFormat,
    },
    /// Print the memory map as JSON
    MemoryMap,
}

fn parse_addr(s: &str) -> Result<u64, String> {
    rotsim_core::bootflow::jtag::parse_number(s).ok_or_else(|| format!("bad address `{s}`"))
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Internal(String),
    Usage(String),
    Boot(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Boot(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run {
            alg,
            size,
            mem,
            arch,
            seed,
            out,
            format,
        } => cmd::run(alg, size, mem, arch, seed, out.as_deref(), format),
        Command::Sweep {
            config,
            reference_grid,
            out,
            format,
            summary,
        } => cmd::sweep(
            config.as_deref(),
            reference_grid,
            out.as_deref(),
            format,
            summary.as_deref(),
        ),
        Command::Boot {
            mode,
            image,
            script,
            json,
        } => cmd::boot(mode, image.as_deref(), script.as_deref(), json),
        Command::PackImage { body, entry, key, out } => cmd::pack_image(&body, entry, &key, &out),
        Command::Report { input, format } => cmd::report(&input, format),
        Command::MemoryMap => cmd::memory_map(),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Internal(m) => eprintln!("error: {m}"),
                Failure::Usage(m) => eprintln!("usage error: {m}"),
                Failure::Boot(m) => eprintln!("boot failed: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

//! `spinorbit`: run teleportation scenarios, conformance tables, HOM scans
//! and N-DoF cascades from the command line.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Preset;
use crate::report::Format;

#[derive(Debug, Parser)]
#[command(name = "spinorbit", version, about = "Spin-orbit teleportation simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format [default: table].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for the optional count sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// TOML scenario file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Teleport one or all of the published inputs.
    Teleport(TeleportArgs),
    /// PBS and BS conformance tables for the hyper-Bell inputs.
    BsmTable,
    /// Two-photon interference delay scan.
    Hom(HomArgs),
    /// Symbolic N-DoF hyper-Bell cascade.
    Cascade(CascadeArgs),
    /// Fidelity of all five inputs under one noise setting.
    Budget(BudgetArgs),
}

#[derive(Debug, Args, Default)]
pub struct NoiseFlags {
    /// Ideal components, ignoring any [noise] table.
    #[arg(long, conflicts_with = "preset")]
    pub ideal: bool,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub background: Option<f64>,
    #[arg(long)]
    pub overlap_pbs: Option<f64>,
    #[arg(long)]
    pub overlap_bs1: Option<f64>,
    #[arg(long)]
    pub overlap_bs2: Option<f64>,
    #[arg(long)]
    pub pair23_fidelity: Option<f64>,
    #[arg(long)]
    pub pair45_fidelity: Option<f64>,
    #[arg(long)]
    pub input_fidelity: Option<f64>,
    #[arg(long)]
    pub oam_leakage: Option<f64>,
    /// Include detection-channel losses.
    #[arg(long)]
    pub lossy: bool,
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    /// Input state A-E.
    #[arg(long)]
    pub state: Option<String>,
    /// Run all five inputs.
    #[arg(long, conflicts_with = "state")]
    pub all: bool,
    /// Leave out the ancilla pair (no signature can fire).
    #[arg(long)]
    pub no_ancilla: bool,
    /// Sample this many heralded trials into illustrative counts.
    #[arg(long)]
    pub shots: Option<u64>,
    #[command(flatten)]
    pub noise: NoiseFlags,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InterferometerArg {
    Pbs,
    Bs1,
    Bs2,
}

#[derive(Debug, Args)]
pub struct HomArgs {
    #[arg(long, value_enum)]
    pub interferometer: Option<InterferometerArg>,
    /// Coherence time in fs [default: 448].
    #[arg(long)]
    pub tau: Option<f64>,
    /// Overlap at zero delay [default: 1].
    #[arg(long, conflicts_with = "visibility")]
    pub overlap: Option<f64>,
    /// Choose the zero-delay overlap that reproduces this visibility.
    #[arg(long)]
    pub visibility: Option<f64>,
    /// Scan half-width in fs [default: 1500].
    #[arg(long)]
    pub delay_max: Option<f64>,
    /// Scan step in fs [default: 100].
    #[arg(long)]
    pub delay_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CascadeArgs {
    /// Number of degrees of freedom [default: 3].
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    #[command(flatten)]
    pub noise: NoiseFlags,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

mod commands;
mod config;
mod figures;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::RunError;
use crate::config::{CommandKind, ConfigError, Flags, RunConfig};

/// Pairwise correlations of the anisotropic XY chain: sweeps, finite rings
/// and figure data.
#[derive(Parser, Debug)]
#[command(name = "xychain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ⟨σz⟩ and the xx, yy, zz two-point functions of the infinite chain.
    Correlators(Flags),
    /// Quantum discord against λ (infinite chain, or a ring with --n).
    DiscordSweep(Flags),
    /// Entanglement of formation against λ (infinite chain, or a ring with --n).
    EofSweep(Flags),
    /// Lowest energy levels of an n-spin ring.
    FiniteSpectrum(Flags),
    /// Ground-state level crossings of an n-spin ring.
    Crossings(Flags),
    /// Thermal critical point estimates and the power-law fit.
    EtcpFit(Flags),
    /// Fidelity between ring pairs and the infinite chain.
    FidelityCompare(Flags),
    /// Data table behind a figure (1–7, 9).
    ReproduceFigure(Flags),
}

impl Command {
    fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::Correlators(f) => (CommandKind::Correlators, f),
            Command::DiscordSweep(f) => (CommandKind::DiscordSweep, f),
            Command::EofSweep(f) => (CommandKind::EofSweep, f),
            Command::FiniteSpectrum(f) => (CommandKind::FiniteSpectrum, f),
            Command::Crossings(f) => (CommandKind::Crossings, f),
            Command::EtcpFit(f) => (CommandKind::EtcpFit, f),
            Command::FidelityCompare(f) => (CommandKind::FidelityCompare, f),
            Command::ReproduceFigure(f) => (CommandKind::ReproduceFigure, f),
        }
    }
}

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("XYCHAIN_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ConfigError(format!("XYCHAIN_THREADS: `{v}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(format!("XYCHAIN_THREADS: {e}")))
}

fn execute(kind: CommandKind, flags: &Flags) -> Result<(), RunError> {
    configure_threads()?;
    let cfg = RunConfig::from_flags(kind, flags)?;
    let tables = commands::run(&cfg)?;
    let written = match (kind, &cfg.output) {
        (CommandKind::ReproduceFigure, Some(dir)) => output::emit_to_dir(&tables, dir, cfg.format),
        (_, out) => output::emit(&tables, out.as_deref(), cfg.format),
    }
    .map_err(|e| RunError::Config(ConfigError(format!("cannot write output: {e}"))))?;
    for p in written {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, flags) = cli.command.split();
    match execute(kind, &flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xychain {}: {e}", kind.name());
            match e {
                RunError::Config(_) => ExitCode::from(2),
                RunError::Numeric(_) => ExitCode::from(1),
            }
        }
    }
}


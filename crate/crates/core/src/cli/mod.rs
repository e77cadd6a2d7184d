//! Command-line front end for `spc`.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{assemble, basis_check, build_hamiltonian, evolve, hopping, potential, CommandOutput};
pub use config::{Overrides, Preset, RunConfig};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "spc", version, about = "Scattering-based photon coupler simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Gap as `Delta / q_max^2`; repeat for several values.
    #[arg(long = "delta", global = true, allow_negative_numbers = true)]
    pub deltas: Vec<f64>,
    /// Named base configuration (`cylinder-fig4`).
    #[arg(long, global = true)]
    pub preset: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Gram, completeness, power-radius and attenuation reports.
    BasisCheck,
    /// Partial traces of the four-mode potential for each gap.
    Potential,
    /// Coherent, incoherent and total hopping matrices.
    Hopping,
    /// Hopping plus interaction coefficients of the effective Hamiltonian.
    Assemble,
    /// Fock-space evolution and observable series.
    Evolve,
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Schema { .. } | Error::Parse { .. } => 2,
        Error::Convergence(_) => 3,
        Error::Capacity { .. } => 4,
        _ => 1,
    }
}

pub fn resolve_config(cli: &Cli) -> Result<RunConfig, Error> {
    let preset = cli.preset.as_deref().map(Preset::parse).transpose()?;
    let overrides = Overrides {
        out: cli.out.clone(),
        seed: cli.seed,
        deltas: cli.deltas.clone(),
    };
    match &cli.config {
        Some(path) => RunConfig::load(path, preset, &overrides).map_err(|e| match e {
            Error::Io { path, source } => Error::Config(format!("cannot read {}: {source}", path.display())),
            other => other,
        }),
        None => RunConfig::resolve(preset, None, &overrides),
    }
}

pub fn run_command(command: Command, cfg: &RunConfig) -> Result<CommandOutput, Error> {
    match command {
        Command::BasisCheck => basis_check(cfg),
        Command::Potential => potential(cfg),
        Command::Hopping => hopping(cfg),
        Command::Assemble => assemble(cfg),
        Command::Evolve => evolve(cfg),
    }
}

/// Parses `args`, runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = resolve_config(&cli).and_then(|cfg| run_command(cli.command, &cfg));
    match result {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for f in &out.files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

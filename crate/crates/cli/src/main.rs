//! `tandem`: run coupled-simulation scenarios, compare coupling regimes,
//! analyze interaction logs, and dump mesh topology.
//!
//! Exit codes are stable: 0 success, 1 I/O or internal error, 2 scenario or
//! log parse error, 3 validation error, 4 instability abort.

mod commands;
mod overrides;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tandem_core::SimError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_INSTABILITY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "tandem",
    about = "Deterministic coupled rigid-body / mass-spring simulation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its artifact bundle.
    Run(RunArgs),
    /// Run a scenario under two-way, one-way, and hybrid coupling with
    /// shared entry conditions and summarize the differences.
    Compare(CompareArgs),
    /// Analyze an interaction log and recommend a coupling regime.
    Advise(AdviseArgs),
    /// Print the secondary system's mesh topology.
    DumpMesh(DumpMeshArgs),
}

#[derive(Args)]
struct CommonRunArgs {
    /// Scenario TOML file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for the artifact bundle.
    #[arg(long)]
    out: PathBuf,
    /// Override a scenario key, e.g. --set primary.dt=1e-4 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Override the time step of both systems.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the run duration (seconds).
    #[arg(long)]
    duration: Option<f64>,
    /// Reserved: the engine is deterministic and uses no randomness.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonRunArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonRunArgs,
}

#[derive(Args)]
struct AdviseArgs {
    /// Interaction log CSV (t,fx,fy,fz,contact_count).
    #[arg(long)]
    log: PathBuf,
    /// Mass of the primary system (kg).
    #[arg(long)]
    mass: f64,
    /// Mean-acceleration threshold (m/s^2) below which the interaction is
    /// insignificant for the primary.
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    /// The interaction's effect on the primary does not matter visually.
    #[arg(long)]
    contextually_unimportant: bool,
    /// The secondary system goes unstable when driven one-way.
    #[arg(long)]
    one_way_unstable: bool,
    /// A cheap stand-in for the secondary is available.
    #[arg(long)]
    stand_in_available: bool,
    /// The two-way debug cycle time is not acceptable.
    #[arg(long)]
    two_way_too_costly: bool,
}

#[derive(Args)]
struct DumpMeshArgs {
    /// Scenario TOML file whose secondary system to dump.
    #[arg(long)]
    scenario: PathBuf,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a scenario key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

/// Map an engine error to the documented exit code.
fn exit_code_for(err: &SimError) -> u8 {
    match err {
        SimError::Parse(_) => EXIT_PARSE,
        SimError::Validation(_) | SimError::InvalidParameter(_) => EXIT_VALIDATION,
        _ => EXIT_INTERNAL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => commands::run(&args.common),
        Command::Compare(args) => commands::compare(&args.common),
        Command::Advise(args) => commands::advise(&args),
        Command::DumpMesh(args) => commands::dump_mesh(&args),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<SimError>()
                .map(exit_code_for)
                .unwrap_or(EXIT_INTERNAL);
            ExitCode::from(code)
        }
    }
}

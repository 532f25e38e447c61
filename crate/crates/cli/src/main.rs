//! `coneheat` — spectral invariants on exact cones from the command line.
//!
//! Every subcommand takes a TOML experiment config (see [`config`]) plus
//! repeatable `--set section.key=value` overrides, writes its artifacts into
//! the configured output directory, and stamps each file with the tool
//! version and the SHA-256 digest of the effective configuration.
//!
//! Exit codes: `0` success, `1` numeric/runtime failure (including failed
//! verification checks), `2` invalid configuration or usage.

mod commands;
mod config;
mod output;
mod parallel;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Failure;

#[derive(Parser)]
#[command(
    name = "coneheat",
    version,
    about = "Heat kernels, resolvents, and renormalized spectral invariants on exact cones"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML experiment config.
    config: PathBuf,
    /// Override a config entry (`section.key=value`; repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the cross-section spectrum and indicial roots.
    Spectrum(CommonArgs),
    /// Evaluate the heat kernel on a point or parameter grid.
    Heat(CommonArgs),
    /// Evaluate the resolvent kernel on a point or parameter grid.
    Resolvent(CommonArgs),
    /// Renormalized heat trace: cutoff sweep, divergent expansion, finite part.
    Rtrace(CommonArgs),
    /// Renormalized zeta function from the trace model.
    Zeta(CommonArgs),
    /// Renormalized determinant (exp of −ζ′(0)) with its Laurent data.
    Det(CommonArgs),
    /// Run a named verification suite against the configured geometry.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Which suite to run.
        #[arg(long, value_enum)]
        suite: verify::Suite,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (common, action): (&CommonArgs, fn(&commands::Ctx) -> Result<(), Failure>) =
        match &cli.command {
            Command::Spectrum(common) => (common, commands::cmd_spectrum),
            Command::Heat(common) => (common, commands::cmd_heat),
            Command::Resolvent(common) => (common, commands::cmd_resolvent),
            Command::Rtrace(common) => (common, commands::cmd_rtrace),
            Command::Zeta(common) => (common, commands::cmd_zeta),
            Command::Det(common) => (common, commands::cmd_det),
            Command::Verify { common, suite } => {
                let ctx = commands::Ctx::build(&common.config, &common.set)?;
                println!("# coneheat {}", ctx.meta.version);
                println!("# config-sha256 {}", ctx.meta.digest);
                return verify::run_suite(&ctx, *suite);
            }
        };
    let ctx = commands::Ctx::build(&common.config, &common.set)?;
    println!("# coneheat {}", ctx.meta.version);
    println!("# config-sha256 {}", ctx.meta.digest);
    action(&ctx)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
    }
}

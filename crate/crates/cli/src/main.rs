use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use viscofix_cli::commands::{cmd_compare, cmd_fredholm, cmd_solve, cmd_validate_schedule};

/// Viscosity implicit iterations for fixed points of nonexpansive maps.
#[derive(Parser)]
#[command(name = "viscofix", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured scheme and report the limit.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// CSV trace path; overrides `[output] trace`.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check a schedule against the convergence conditions.
    #[command(group(ArgGroup::new("source").required(true).args(["preset", "config"])))]
    ValidateSchedule {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        horizon: u64,
    },
    /// Run two schemes on the same problem and compare their limits.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Two scheme names or numbers, e.g. `5,7`.
        #[arg(long)]
        schemes: String,
    },
    /// Solve a Fredholm problem and print the grid solution.
    Fredholm {
        #[arg(long)]
        config: PathBuf,
        /// CSV output with header `t,x`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve { config, trace } => cmd_solve(config, trace.as_deref()),
        Command::ValidateSchedule {
            preset,
            config,
            horizon,
        } => cmd_validate_schedule(preset.as_deref(), config.as_deref(), *horizon),
        Command::Compare { config, schemes } => cmd_compare(config, schemes),
        Command::Fredholm { config, out } => cmd_fredholm(config, out.as_deref()),
    };
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.code as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use perclab_cli::error::CliError;
use perclab_cli::registry;

#[derive(Parser)]
#[command(name = "perclab", version, about = "Seeded percolation, branching-walk and Green's function experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Override a config value, e.g. `--set params.p=0.6` (repeatable).
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
    },
    /// Show parameters and CSV columns of an experiment (all when omitted).
    Describe { experiment: Option<String> },
    /// Re-run a config and check that it reproduces a stored summary.
    ReplayCheck {
        summary: PathBuf,
        config: PathBuf,
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
    },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    code(e.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, set } => match perclab_cli::run(&config, &set, &mut std::io::stdout().lock()) {
            Ok(c) => code(c),
            Err(e) => fail(e),
        },
        Command::Describe { experiment } => match experiment {
            None => {
                for def in registry::EXPERIMENTS {
                    println!("{}", registry::describe(def));
                }
                code(0)
            }
            Some(name) => match registry::find(&name) {
                Some(def) => {
                    print!("{}", registry::describe(def));
                    code(0)
                }
                None => fail(CliError::Config(format!(
                    "unknown experiment `{name}` (expected one of: {})",
                    registry::names().join(", ")
                ))),
            },
        },
        Command::ReplayCheck { summary, config, set } => match perclab_cli::replay_check(&summary, &config, &set) {
            Ok(r) if r.matches => {
                println!("replay: match");
                code(0)
            }
            Ok(r) => {
                println!("replay: MISMATCH");
                for d in r.diagnostics {
                    println!("  {d}");
                }
                code(1)
            }
            Err(e) => fail(e),
        },
    }
}

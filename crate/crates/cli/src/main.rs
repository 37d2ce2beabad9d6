use std::path::PathBuf;
use std::process::ExitCode;

use catastrophe_cli::scenarios::{self, SCENARIOS};
use catastrophe_cli::{execute, parse, resolve_output_dir, CliError, OUT_DIR_ENV};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "catastrophe", version, about = "Overlap, kinetics and avalanche studies from config files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the study described by a config file.
    Run {
        config: PathBuf,
        /// Output directory; overrides the environment and the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a canned scenario.
    Scenario {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List canned scenarios.
    ListScenarios,
}

fn env_out_dir() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn run(command: Command) -> Result<(), CliError> {
    let (text, out, scenario) = match command {
        Command::ListScenarios => {
            for s in &SCENARIOS {
                println!("{:<18} {}", s.name, s.description);
            }
            return Ok(());
        }
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config).map_err(|e| CliError::Validation {
                field: "config".into(),
                reason: format!("cannot read {}: {e}", config.display()),
            })?;
            (text, out, None)
        }
        Command::Scenario { name, out } => {
            let s = scenarios::find(&name).ok_or_else(|| CliError::Validation {
                field: "scenario".into(),
                reason: format!("unknown scenario {name:?}; see list-scenarios"),
            })?;
            (s.config.to_string(), out, Some(s.name))
        }
    };
    let cfg = parse(&text)?;
    let dir = resolve_output_dir(out.as_deref(), env_out_dir(), &cfg)?;
    let manifest = execute(&cfg, &text, &dir, scenario)?;
    for a in &manifest.artifacts {
        println!("{}", dir.join(&a.file).display());
    }
    println!("{}", dir.join(catastrophe_cli::output::MANIFEST_FILE).display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `nichewave <command> <config.toml>`: runs one experiment and writes
//! `<command>-<label>.csv` and `<command>-<label>.json` to the output directory.
//!
//! Exit status: 0 on success, 1 on a configuration error, 2 on a numerical
//! failure.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use commands::{CliError, Runner};
use config::Config;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Validate,
    Spectrum,
    Stationary,
    Evolve,
    Sweep,
    EpsStar,
    Ess,
    FatTail,
    Audit,
}

#[derive(Debug, Parser)]
#[command(name = "nichewave", version, about = "Persistence experiments for the nonlocal Fisher-KPP equation")]
struct Args {
    command: Command,
    config: PathBuf,
}

fn load(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))
}

fn workers(config: &Config) -> Result<Option<usize>, CliError> {
    match std::env::var("NICHEWAVE_WORKERS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("`NICHEWAVE_WORKERS`: expected a positive integer, got `{v}`"))),
        Err(_) => match config.workers {
            Some(0) => Err(CliError::Config("`workers`: must be positive".into())),
            w => Ok(w),
        },
    }
}

fn run(args: &Args) -> Result<String, CliError> {
    let config = load(&args.config)?;
    if let Some(n) = workers(&config)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("`workers`: {e}")))?;
    }
    let base = args.config.parent().unwrap_or(Path::new("."));
    let output_dir = base.join(&config.output_dir);
    let name = args.command.to_possible_value().expect("no skipped variants").get_name().to_string();
    Runner::new(config, output_dir)?.run(&name)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

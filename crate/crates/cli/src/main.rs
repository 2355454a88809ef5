use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use muxepi_cli::{parse_config, run, Command, Overrides, Status, MANIFEST, SEED_ENV};

/// Usage or configuration error; nothing was run.
const EXIT_USAGE: u8 = 2;
/// Some runs hit `max_steps` before absorbing.
const EXIT_INCOMPLETE: u8 = 3;

/// Awareness-disease spreading on two-layer multiplex networks with silent
/// nodes.
#[derive(Debug, Parser)]
#[command(name = "muxepi", version)]
struct Cli {
    /// Subcommand; overrides `subcommand` in the config file.
    #[arg(value_enum)]
    command: Option<Command>,

    /// Configuration file (TOML).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Master seed; falls back to the config file, then $MUXEPI_SEED, then 0.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,

    /// Maximum number of worker threads.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,

    /// Override a config value, e.g. `--set dynamics.beta_u=0.3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    assignments: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("muxepi: {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        },
        None => None,
    };
    let overrides = Overrides {
        command: cli.command,
        out_dir: cli.out,
        seed: cli.seed,
        jobs: cli.jobs.map(|j| j as usize),
        assignments: cli.assignments,
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let config = match parse_config(text.as_deref(), &overrides, env_seed.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            match &cli.config {
                Some(path) => eprintln!("muxepi: {}: {e}", path.display()),
                None => eprintln!("muxepi: {e}"),
            }
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let (manifest, result) = run(&config);
    match result {
        Ok(()) => {
            println!(
                "{}: wrote {} to {} in {:.2}s",
                manifest.subcommand,
                manifest.outputs.join(", "),
                config.out_dir.display(),
                manifest.wall_time_secs
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("muxepi {}: {e}", manifest.subcommand);
            if manifest.status == Status::Incomplete {
                eprintln!("outputs were written and are marked incomplete in {}", MANIFEST);
                ExitCode::from(EXIT_INCOMPLETE)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twoin1::commands;
use twoin1::{Format, Result, RunConfig, Runner};

#[derive(Parser)]
#[command(
    name = "twoin1",
    version,
    about = "Design and evaluation of flexible seamless 2-in-1 trials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML or JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, env = "TWOIN1_THREADS")]
    threads: Option<usize>,
    /// Output directory (default: config `output.dir`, else the current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<Format>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Minimal safe interim cutoff, optionally over a (t, ρ, cap) grid.
    Cmin,
    /// Type-I error as a function of the interim cutoff.
    Type1Curve,
    /// Simulated operating characteristics per scenario and design.
    Oc,
    /// Power and expansion probability over HR / ORR grids.
    PowerStudy,
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let path = cli
        .config
        .ok_or_else(|| twoin1::CliError::Invalid("--config is required".into()))?;
    let mut config = RunConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let format = cli.format.unwrap_or(config.output.format);
    config.output.format = format;
    let dir = cli
        .out
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    config.output.dir = None;
    let runner = Runner::new(cli.threads)?;
    match cli.command {
        Command::Cmin => commands::cmin(&config, &runner)?.write(&dir, &config, format),
        Command::Type1Curve => {
            commands::type1_curve(&config, &runner)?.write(&dir, &config, format)
        }
        Command::Oc => commands::oc(&config, &runner)?.write(&dir, &config, format),
        Command::PowerStudy => {
            commands::power_study(&config, &runner)?.write(&dir, &config, format)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

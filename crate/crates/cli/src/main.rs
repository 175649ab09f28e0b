use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use torus_spread_cli::config::{Command, ExperimentConfig};
use torus_spread_cli::{run, RunOptions};

/// Builds and checks torus maps that spread the unit square onto zonogons,
/// and estimates rotation sets.
///
/// Exit status: 0 pass, 1 error, 2 a check was violated, 3 inconclusive.
#[derive(Parser)]
#[command(name = "torus-spread", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Derive the spreading map for a target zonogon.
    Build(Flags),
    /// Run the stage-by-stage verification of the conjugated translation.
    Verify(Flags),
    /// Estimate rotation sets of a map or of a commuting family.
    Rotate(Flags),
    /// Search for an iterate that is dense in some ball.
    Probe(Flags),
    /// Draw a previously written record as SVG.
    Render(Flags),
}

#[derive(Args)]
struct Flags {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory for the record, cloud files and SVG.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Worker threads; falls back to TORUS_SPREADER_THREADS.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Overrides the config's seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Raises the shear period above its minimum.
    #[arg(long, value_name = "N")]
    xi_override: Option<u64>,
}

impl Sub {
    fn split(self) -> (Command, Flags) {
        match self {
            Sub::Build(f) => (Command::Build, f),
            Sub::Verify(f) => (Command::Verify, f),
            Sub::Rotate(f) => (Command::Rotate, f),
            Sub::Probe(f) => (Command::Probe, f),
            Sub::Render(f) => (Command::Render, f),
        }
    }
}

fn threads(flag: Option<usize>) -> anyhow::Result<Option<usize>> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var("TORUS_SPREADER_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("TORUS_SPREADER_THREADS={v:?} is not a thread count")),
        Err(_) => Ok(None),
    }
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    let (command, flags) = cli.command.split();
    if let Some(n) = threads(flags.threads)? {
        if n == 0 {
            bail!("thread count must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot start the thread pool")?;
    }
    let text = std::fs::read_to_string(&flags.config)
        .with_context(|| format!("cannot read config `{}`", flags.config.display()))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    match config.command {
        Some(c) if c != command => bail!(
            "invalid config field `command`: config is for `{c}` but `{command}` was requested"
        ),
        _ => config.command = Some(command),
    }
    if let Some(seed) = flags.seed {
        config.seed = seed;
    }
    if let Some(xi) = flags.xi_override {
        config.xi_override = Some(xi);
    }
    let opts = RunOptions {
        out_dir: Some(flags.out),
        config_dir: flags.config.parent().map(PathBuf::from).unwrap_or_default(),
    };
    let outcome = run(&config, &opts)?;
    println!("{}", outcome.summary);
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

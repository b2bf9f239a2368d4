//! Config-driven experiment runner.
//!
//! A run reads a TOML config naming an experiment, a seed, a trial count and
//! a `[params]` table, runs the trials in parallel (trial `i` draws from
//! stream `(seed, i)`), and writes a CSV with `# key: value` metadata lines
//! in front of the header. Output is byte-identical for a fixed config.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use purify_core::RngStream;
use rayon::prelude::*;

pub use config::{ExperimentConfig, Overrides};
pub use error::{CliError, CliResult};
pub use experiments::{Experiment, CATALOG};

/// Runs every trial and renders the CSV body without writing it.
pub fn render(config: &ExperimentConfig) -> CliResult<String> {
    let seed =
        config.seed.ok_or_else(|| CliError::Usage("a seed is required (config `seed` or --seed)".into()))?;
    let diags = config.experiment.validate();
    if !diags.is_empty() {
        return Err(CliError::Usage(diags.join("; ")));
    }
    let exp = &config.experiment;
    let trials = if exp.deterministic() { 1 } else { config.trials };
    let per_trial: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|t| exp.trial(t, &mut RngStream::new(seed, t)))
        .collect::<CliResult<_>>()?;
    let rows: Vec<_> = per_trial.into_iter().flatten().collect();
    let meta = vec![
        ("experiment".to_string(), exp.name().to_string()),
        ("config".to_string(), config.canonical_json()),
        ("config_hash".to_string(), config.hash()),
    ];
    table::render(&meta, &exp.columns(), &rows)
}

/// Runs the experiment and writes the CSV. Nothing is written on error.
pub fn run(config: &ExperimentConfig) -> CliResult<PathBuf> {
    let out = config
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("an output path is required (config `out` or --out)".into()))?;
    let body = render(config)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&out, body)?;
    Ok(out)
}

#[derive(Parser)]
#[command(name = "purify", about = "Run purification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Check a config and print any violated preconditions.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the available experiments.
    List,
}

/// Entry point shared by the binary and tests; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Run { config, seed, out, trials } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.apply(&Overrides { seed, out, trials });
            if cfg.trials == 0 {
                return Err(CliError::Usage("trials must be at least 1".into()));
            }
            let path = run(&cfg)?;
            println!("{} -> {} (config_hash {})", cfg.experiment.name(), path.display(), cfg.hash());
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let diags = cfg.experiment.validate();
            if diags.is_empty() {
                println!("ok: {}", cfg.experiment.name());
                Ok(())
            } else {
                for d in &diags {
                    println!("{d}");
                }
                Err(CliError::Usage(format!("{} violated precondition(s)", diags.len())))
            }
        }
        Command::List => {
            for (name, about) in CATALOG {
                println!("{name:<12} {about}");
            }
            Ok(())
        }
    }
}

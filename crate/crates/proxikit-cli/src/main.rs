//! `proxikit`: repair, validate, and aggregate badge proximity streams.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::Config;

#[derive(Parser)]
#[command(
    name = "proxikit",
    version,
    about = "Toolkit for time-stamped badge proximity edgelists",
    after_help = "Settings come from --config (key = value lines), the \
                  PROXIKIT_OUT_DIR environment variable (output directory \
                  only), and flags; later sources win in that order."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an edgelist, apply a repair pipeline, write the result
    Preprocess(RunArgs),
    /// Classify a measured stream against a truth stream
    Validate(RunArgs),
    /// Sweep one repair strategy's parameter against truth
    Sweep(RunArgs),
    /// Aggregate a stream into dyadic minutes and descriptives
    Aggregate(RunArgs),
    /// Regress nominations on contact minutes
    Regress(RunArgs),
    /// Cohen's kappa between a stream and a truth stream, per second
    Kappa(RunArgs),
    /// Generate a synthetic truth stream and its degraded counterpart
    Simulate(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Preprocess(_) => "preprocess",
            Command::Validate(_) => "validate",
            Command::Sweep(_) => "sweep",
            Command::Aggregate(_) => "aggregate",
            Command::Regress(_) => "regress",
            Command::Kappa(_) => "kappa",
            Command::Simulate(_) => "simulate",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Preprocess(a)
            | Command::Validate(a)
            | Command::Sweep(a)
            | Command::Aggregate(a)
            | Command::Regress(a)
            | Command::Kappa(a)
            | Command::Simulate(a) => a,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Config file with key = value lines
    #[arg(short, long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override any config key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Input edgelist
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,

    /// Ground-truth edgelist
    #[arg(long, value_name = "FILE")]
    truth: Option<PathBuf>,

    /// Nomination pairs file
    #[arg(long, value_name = "FILE")]
    nominations: Option<PathBuf>,

    /// Group-meeting schedule for the simulator
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,

    /// Window open, epoch seconds or ISO-8601
    #[arg(long, value_name = "TIME")]
    window_start: Option<String>,

    /// Window close, epoch seconds or ISO-8601
    #[arg(long, value_name = "TIME")]
    window_end: Option<String>,

    /// Repair pipeline, e.g. interpolate:75,min_duration:55 or default
    #[arg(long, value_name = "SPEC")]
    pipeline: Option<String>,

    /// Strategy to sweep: min_duration, interpolate, or triadic
    #[arg(long, value_name = "KIND")]
    sweep_kind: Option<String>,

    /// Grid as start:end:step or a comma list
    #[arg(long, value_name = "VALUES")]
    sweep_values: Option<String>,

    /// Nomination symmetrization: none, weak, or strong
    #[arg(long, value_name = "MODE")]
    symmetrize: Option<String>,

    /// Output directory (default: out)
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Random seed for the simulator
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Exit 0 even when input rows were rejected
    #[arg(long)]
    permissive: bool,
}

fn build_config(args: &RunArgs) -> Result<Config> {
    let mut cfg = match &args.config {
        Some(path) => Config::load_file(path)?,
        None => Config::default(),
    };
    cfg.apply_env();
    for pair in &args.set {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| anyhow::anyhow!("--set needs KEY=VALUE, got {pair:?}"))?;
        cfg.set(key.trim(), value.trim())?;
    }
    let paths = [
        ("input", &args.input),
        ("truth", &args.truth),
        ("nominations", &args.nominations),
        ("scenario", &args.scenario),
        ("out_dir", &args.out_dir),
    ];
    for (key, value) in paths {
        if let Some(path) = value {
            cfg.set(key, &path.to_string_lossy())?;
        }
    }
    let strings = [
        ("window_start", &args.window_start),
        ("window_end", &args.window_end),
        ("pipeline", &args.pipeline),
        ("sweep_kind", &args.sweep_kind),
        ("sweep_values", &args.sweep_values),
        ("symmetrize", &args.symmetrize),
    ];
    for (key, value) in strings {
        if let Some(value) = value {
            cfg.set(key, value)?;
        }
    }
    if let Some(seed) = args.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    if args.permissive {
        cfg.set("permissive", "true")?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome =
        build_config(cli.command.args()).and_then(|cfg| commands::run(cli.command.name(), &cfg));
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

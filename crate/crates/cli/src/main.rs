use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use mlcc_cli::commands::{self, Context, Format};
use mlcc_cli::experiment::default_workers;
use mlcc_cli::ExperimentConfig;

#[derive(Debug, Parser)]
#[command(name = "mlcc", version, about = "Run and compare multi-layer DE experiments")]
struct Cli {
    /// TOML experiment config; defaults apply to anything left out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed; run k uses seed + k.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, env = "MLCC_OUT_DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Export the benchmark suite manifest.
    Suite,
    /// Run algorithms on the suite and write runs.csv plus traces.
    Run {
        /// Algorithm names; defaults to `run.algorithms` from the config.
        #[arg(long = "algorithm", short = 'a')]
        algorithms: Vec<String>,
    },
    /// Statistical comparison of runs CSV files.
    Compare {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Algorithm the others are compared against; defaults to the first.
        #[arg(long)]
        baseline: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Rank archives of the classic DE variants.
    Motivate,
    /// Sensitivity of MLCC to N and top_G overrides.
    SweepN {
        /// Comma-separated settings, baseline first (e.g. n=0.05,n=1.0,topg=np).
        #[arg(long, value_delimiter = ',')]
        settings: Vec<String>,
    },
    /// MLCC and its ablation variants against the single-layer baselines.
    Ablate,
}

fn context(cli: &Cli) -> Result<Context> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.run.base_seed = seed;
    }
    if let Some(runs) = cli.runs {
        config.run.runs = runs;
    }
    if let Command::Compare { alpha: Some(a), .. } = cli.command {
        config.stats.alpha = a;
    }
    config.validate()?;
    let out = cli
        .out
        .clone()
        .or_else(|| config.output.directory.clone())
        .unwrap_or_else(|| PathBuf::from("mlcc-out"));
    Ok(Context {
        config,
        out,
        workers: cli.workers.unwrap_or_else(default_workers),
        format: cli.format,
    })
}

fn execute(cli: &Cli) -> Result<String> {
    let ctx = context(cli)?;
    match &cli.command {
        Command::Suite => commands::suite(&ctx),
        Command::Run { algorithms } => commands::run(&ctx, algorithms),
        Command::Compare { inputs, baseline, .. } => {
            commands::compare_files(&ctx, inputs, baseline.as_deref())
        }
        Command::Motivate => commands::motivate(&ctx),
        Command::SweepN { settings } => commands::sweep_n(&ctx, settings),
        Command::Ablate => commands::ablate(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

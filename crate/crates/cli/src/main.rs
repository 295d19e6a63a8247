use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use hyperalg_cli::{
    catalog_list, preset, run, AnalyzeParams, ClassifyParams, Experiment, ExperimentConfig, Overrides, WitnessConfig,
};

#[derive(Parser)]
#[command(name = "hyperalg", version, about = "Classify convolution operators and build witnesses for their hypercyclic algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Growth, derivatives and ray scans of a symbol
    Analyze(RunArgs),
    /// Decide whether the operator supports a hypercyclic algebra
    Classify(RunArgs),
    /// Single-generator witness
    Witness(RunArgs),
    /// Multi-generator witness
    WitnessMulti(RunArgs),
    /// Re-check a witness report independently
    Verify(RunArgs),
    /// List the symbol presets and their expected verdicts
    Catalog,
}

#[derive(Args)]
struct RunArgs {
    /// experiment config (JSON)
    #[arg(long)]
    config: Option<PathBuf>,
    /// preset symbol name from `catalog`, used with default parameters when no config is given
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// output directory for report.json and side files
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_radius: Option<f64>,
    #[arg(long)]
    grid_samples: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    n_max: Option<u64>,
}

fn config_for(name: &str, args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(p)) => {
            let symbol = preset(p).with_context(|| format!("unknown preset {p:?}; see `hyperalg catalog`"))?;
            let experiment = match name {
                "analyze" => Experiment::Analyze(AnalyzeParams::default()),
                "classify" => Experiment::Classify(ClassifyParams::default()),
                "witness" => Experiment::Witness(WitnessConfig::default()),
                _ => bail!("{name} needs a config file"),
            };
            ExperimentConfig { symbol, experiment, seed: 0, output: None }
        }
        (None, None) => bail!("give --config PATH or --preset NAME"),
    };
    if cfg.experiment.name() != name {
        bail!("config is for `{}`, not `{name}`", cfg.experiment.name());
    }
    cfg.apply(&Overrides {
        seed: args.seed,
        grid_radius: args.grid_radius,
        grid_samples: args.grid_samples,
        epsilon: args.epsilon,
        n_max: args.n_max,
        output: args.out.clone(),
    });
    Ok(cfg)
}

/// Prints to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn execute(name: &str, args: &RunArgs) -> anyhow::Result<i32> {
    let cfg = config_for(name, args)?;
    let mut report = run(&cfg)?;
    match cfg.output.clone() {
        Some(dir) => {
            let path = report.write(&dir)?;
            eprintln!("wrote {}", path.display());
        }
        None => emit(&report.to_json()?),
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(report.status().code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Analyze(a) => ("analyze", a),
        Command::Classify(a) => ("classify", a),
        Command::Witness(a) => ("witness", a),
        Command::WitnessMulti(a) => ("witness-multi", a),
        Command::Verify(a) => ("verify", a),
        Command::Catalog => {
            match serde_json::to_string_pretty(&catalog_list()) {
                Ok(s) => emit(&s),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            return ExitCode::SUCCESS;
        }
    };
    match execute(name, args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

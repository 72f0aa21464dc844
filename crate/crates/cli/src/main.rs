use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mvopls_cli::{cmd_classify, cmd_fit, cmd_gen_toy, cmd_retrieve, cmd_sweep, exit_code, ExperimentConfig};

#[derive(Parser)]
#[command(name = "mvopls", version, about = "Multi-view subspace learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Fit on the whole dataset and save the model.
    Fit,
    /// Repeated split classification accuracy.
    Classify,
    /// Cross-modal retrieval mAP between two views.
    Retrieve,
    /// Grid over k, training fraction, lambda and depth.
    Sweep,
    /// Write the synthetic dataset as CSV files.
    GenToy,
}

fn load_config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| mvopls::Error::InvalidParameter("--config is required".into()))?;
    let cfg = ExperimentConfig::read(path)?;
    Ok(match cli.seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    })
}

fn run(cli: &Cli) -> anyhow::Result<String> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::GenToy => {
            let cfg = cli.config.as_ref().map(|_| load_config(cli)).transpose()?;
            let dir = out
                .map(PathBuf::from)
                .or_else(|| cfg.as_ref().and_then(|c| c.out.clone()))
                .ok_or_else(|| mvopls::Error::InvalidParameter("gen-toy needs --out".into()))?;
            cmd_gen_toy(cfg.as_ref(), cli.seed, &dir)
        }
        Command::Fit => cmd_fit(&load_config(cli)?, out),
        Command::Classify => cmd_classify(&load_config(cli)?, out),
        Command::Retrieve => cmd_retrieve(&load_config(cli)?, out),
        Command::Sweep => cmd_sweep(&load_config(cli)?, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

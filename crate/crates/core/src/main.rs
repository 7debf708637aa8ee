use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use losskit::harness::{execute, Experiment, Format, Overrides};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Encode,
    Recover,
    ClusterFidelity,
    Oneway,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

/// Loss-tolerant code experiments.
#[derive(Debug, Parser)]
#[command(name = "losskit", version)]
struct Cli {
    command: Command,
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    /// White-noise weight v of the ideal state.
    #[arg(long = "noise-v")]
    noise_v: Option<f64>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    /// Keep only one branch: BITS or LOST:BITS.
    #[arg(long = "force-branch")]
    force_branch: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Command::Encode => Experiment::Encode,
        Command::Recover => Experiment::Recover,
        Command::ClusterFidelity => Experiment::ClusterFidelity,
        Command::Oneway => Experiment::Oneway,
    };
    let overrides = Overrides {
        seed: cli.seed,
        shots: cli.shots,
        noise_v: cli.noise_v,
        out: cli.out,
        format: cli.format.map(|f| match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }),
        force_branch: cli.force_branch,
    };
    match execute(command, &cli.config, overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("losskit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

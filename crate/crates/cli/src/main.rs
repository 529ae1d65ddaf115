use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lseval_cli::commands::{decode, eval, gtmaps, synth};

/// Evaluation pipeline for line segment detectors: synthetic scenes,
/// ground-truth tensors, map decoding, and the metric suite.
#[derive(Debug, Parser)]
#[command(name = "lseval", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Worker threads; falls back to LSEVAL_JOBS, then all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Metric config JSON overriding the defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Suppress progress output on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score detections against ground truth and write reports.
    Eval(eval::EvalArgs),
    /// Decode map tensors into a detections file.
    Decode(decode::DecodeArgs),
    /// Build ground-truth tensors from annotations.
    Gtmaps(gtmaps::GtmapsArgs),
    /// Generate synthetic scenes and perturbed detections.
    Synth(synth::SynthArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(args) => eval::run(
            args,
            cli.global.jobs,
            cli.global.config.as_deref(),
            cli.global.quiet,
        )
        .map(|_| ()),
        Command::Decode(args) => decode::run(args, cli.global.quiet).map(|_| ()),
        Command::Gtmaps(args) => gtmaps::run(args, cli.global.quiet).map(|_| ()),
        Command::Synth(args) => synth::run(args, cli.global.quiet).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

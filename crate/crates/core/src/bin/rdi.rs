use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rdi::cli::{exit_code, run, CommandKind};

#[derive(Parser)]
#[command(name = "rdi", version, about = "Rate, distortion and leakage regions with side information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the region at the configured points.
    Region(Args),
    /// Sweep a curve over the distortion (and helper-rate) grid.
    Sweep(Args),
    /// Simulate the open-switch scheme at a small blocklength.
    Simulate(Args),
    /// Exhaustively check a binning or one-time-pad lemma.
    VerifyLemma(Args),
    /// Evaluate the Gaussian closed forms.
    Gaussian(Args),
    /// Write the curves of a built-in figure.
    Reproduce(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Region(a) => (CommandKind::Region, a),
        Command::Sweep(a) => (CommandKind::Sweep, a),
        Command::Simulate(a) => (CommandKind::Simulate, a),
        Command::VerifyLemma(a) => (CommandKind::VerifyLemma, a),
        Command::Gaussian(a) => (CommandKind::Gaussian, a),
        Command::Reproduce(a) => (CommandKind::Reproduce, a),
    };
    match run(kind, &args.config, args.seed, args.out) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rdi: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use icf_cli::{execute, load_config, write_output, Command, Overrides};

#[derive(Parser)]
#[command(name = "icf", version, about = "Field correlators from process vectors with indefinite causal order")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON experiment config; the built-in default is used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// dense, factored, or both
    #[arg(long, global = true)]
    strategy: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Run the property suite and print a per-check table.
    Verify,
    /// Sweep Δt and tabulate forward, reverse and commutator values.
    Correlate,
    /// Sweep the mixing angle between the two causal orders.
    Superpose,
    /// Time dense against factored contraction.
    Bench,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Verify => Command::Verify,
        Cmd::Correlate => Command::Correlate,
        Cmd::Superpose => Command::Superpose,
        Cmd::Bench => Command::Bench,
    };
    let overrides = Overrides { config: cli.config, seed: cli.seed, strategy: cli.strategy, out: cli.out };
    let result = load_config(&overrides).and_then(|cfg| execute(command, cfg));
    match result {
        Ok(outcome) => {
            if let Err(e) = write_output(&outcome) {
                eprintln!("error: {e}");
                return e.exit_code();
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

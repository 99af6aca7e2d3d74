use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use warphopf_cli::{run_file, RunOptions};

#[derive(Parser)]
#[command(
    name = "warphopf",
    version,
    about = "Check surface identities in warped-product 3-manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks described by a JSON config file.
    Run {
        config: PathBuf,
        /// Worker threads (falls back to the config, then WARPHOPF_THREADS).
        #[arg(long)]
        threads: Option<usize>,
        /// Write the per-node shape field to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let Command::Run {
        config,
        threads,
        csv,
    } = Cli::parse().command;
    match run_file(
        &config,
        &RunOptions {
            threads,
            csv_path: csv,
        },
    ) {
        Ok(report) => {
            println!(
                "{}: {} checks, {}",
                config.display(),
                report.results.len(),
                if report.passed { "passed" } else { "FAILED" }
            );
            ExitCode::from(report.exit_code() as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

//! `trm`: planning, coding, simulation and benchmarks for tensor Reed-Muller
//! codes.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 when the request is
//! well formed but the codes say no (planner diagnostic, shape mismatch,
//! failed oracle check).

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod bench;
mod codec;
mod error;
mod oracle_check;
mod output;
mod plan;
mod simulate;

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "trm", version, about = "Tensor Reed-Muller codes")]
struct Cli {
    /// Worker threads for trial campaigns (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Choose code parameters, or describe an explicit profile.
    Plan(plan::PlanArgs),
    /// Encode a coefficient file into a codeword tensor.
    Encode(codec::EncodeArgs),
    /// Decode a received tensor.
    Decode(codec::DecodeArgs),
    /// Run a Monte-Carlo campaign described by a JSON config.
    Simulate(simulate::SimulateArgs),
    /// Time each decoder stage over a range of block lengths.
    Bench(bench::BenchArgs),
    /// Compare the fast paths against brute-force references.
    OracleCheck(oracle_check::OracleCheckArgs),
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    }
    match cli.command {
        Command::Plan(a) => plan::run(&a),
        Command::Encode(a) => codec::encode(&a),
        Command::Decode(a) => codec::decode(&a),
        Command::Simulate(a) => simulate::run(&a),
        Command::Bench(a) => bench::run(&a),
        Command::OracleCheck(a) => oracle_check::run(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("trm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! Command-line front end for the spoofing evaluation toolkit.
//!
//! Exit codes: 0 on success, 1 for unreadable or unusable data, 2 when a
//! submission fails validation against its key, 64 for usage errors.

mod calibrate;
mod common;
mod det;
mod evaluate;
mod validate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::common::{EXIT_OK, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(
    name = "spoofeval",
    version,
    about = "Evaluates spoofing detection and spoofing-robust verification score submissions",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for metric computation (0 or absent: all cores)
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a submission against a key file and write a metric report
    Evaluate(evaluate::EvaluateArgs),
    /// Check that a submission covers a key file, without scoring it
    Validate(validate::ValidateArgs),
    /// Dump the detection error tradeoff of one score channel as a table
    Det(det::DetArgs),
    /// Fit a score-to-LLR calibration map on a keyed dev set
    Calibrate(calibrate::CalibrateArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => {
            // Help and version requests arrive as errors too; they print to
            // stdout and exit cleanly, unlike genuine usage mistakes.
            let code = if error.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            };
            let _ = error.print();
            return ExitCode::from(code);
        }
    };

    if let Some(jobs) = cli.jobs {
        // Build the global worker pool before any parallel section runs. A
        // failure only means a pool already exists, which keeps the default.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }

    let result = match &cli.command {
        Command::Evaluate(args) => evaluate::run(args),
        Command::Validate(args) => validate::run(args),
        Command::Det(args) => det::run(args),
        Command::Calibrate(args) => calibrate::run(args),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}

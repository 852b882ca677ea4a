use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zariski::cli::{self, DecomposeOptions, WitnessOptions};

#[derive(Parser)]
#[command(
    name = "zariski",
    version,
    about = "Exact Zariski decompositions with certificates"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose the divisor of a problem file into P + N.
    Decompose {
        problem: PathBuf,
        /// Emit the machine-readable JSON report.
        #[arg(long)]
        json: bool,
        /// Also run the Fujita-style iteration and record agreement.
        #[arg(long)]
        oracle: bool,
        /// Print nothing; only the exit code reports the outcome.
        #[arg(long)]
        quiet: bool,
    },
    /// Re-check a report against its problem file.
    Verify { problem: PathBuf, report: PathBuf },
    /// Search for an effective nonzero nef divisor, or certify negative definiteness.
    Witness {
        problem: PathBuf,
        /// Emit the witness as JSON.
        #[arg(long)]
        json: bool,
        /// Comma-separated component indices to search on.
        #[arg(long, value_name = "I,J,K")]
        witness_support: Option<String>,
        /// Print nothing; only the exit code reports the outcome.
        #[arg(long)]
        quiet: bool,
    },
    /// Write a reproducible corpus of random problem files.
    Generate {
        #[arg(long)]
        seed: u64,
        /// Number of curves per problem.
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                cli::EXIT_INPUT as u8
            } else {
                0
            });
        }
    };
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    let code = match args.command {
        Command::Decompose {
            problem,
            json,
            oracle,
            quiet,
        } => cli::cmd_decompose(
            &problem,
            DecomposeOptions {
                json,
                oracle,
                quiet,
            },
            &mut out,
            &mut err,
        ),
        Command::Verify { problem, report } => {
            cli::cmd_verify(&problem, &report, &mut out, &mut err)
        }
        Command::Witness {
            problem,
            json,
            witness_support,
            quiet,
        } => {
            let support = match witness_support
                .as_deref()
                .map(cli::parse_support_list)
                .transpose()
            {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(cli::EXIT_INPUT as u8);
                }
            };
            cli::cmd_witness(
                &problem,
                &WitnessOptions {
                    json,
                    quiet,
                    support,
                },
                &mut out,
                &mut err,
            )
        }
        Command::Generate {
            seed,
            size,
            count,
            out_dir,
        } => cli::cmd_generate(seed, size, count, &out_dir, &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}

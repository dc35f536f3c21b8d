use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use semiband::cli::{cmd_analyze, cmd_interval, cmd_probe, cmd_selftest, parse_dims, CmdOutcome, Config, EXIT_INPUT};

#[derive(Parser)]
#[command(
    name = "semiband",
    version,
    about = "Exact support analysis of operators on atomic and interval lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a matrix operator file.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
        max_atoms: u64,
    },
    /// Analyze a finite-rank operator on piecewise polynomials over [0,1].
    Interval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Search small spaces for norm-one SCP projections that do not decompose.
    Probe {
        #[arg(long)]
        p: String,
        #[arg(long, default_value = "2..3")]
        dims: String,
        #[arg(long, default_value_t = 200)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance campaign.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, hide = true)]
        tamper: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze {
            input,
            report,
            max_atoms,
        } => cmd_analyze(
            &input,
            &Config {
                max_atoms: max_atoms as usize,
                output: report,
                ..Config::default()
            },
        ),
        Command::Interval { input, report } => cmd_interval(
            &input,
            &Config {
                output: report,
                ..Config::default()
            },
        ),
        Command::Probe {
            p,
            dims,
            budget,
            seed,
            out,
        } => match parse_dims(&dims) {
            Ok(d) => cmd_probe(
                &p,
                d,
                &Config {
                    budget,
                    seed,
                    output: Some(out),
                    ..Config::default()
                },
            ),
            Err(e) => CmdOutcome {
                code: EXIT_INPUT,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            },
        },
        Command::Selftest { seed, tamper } => cmd_selftest(seed, tamper),
    };
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyonic::io::{
    certificate_to_json, chsh_to_json, format_number, parse_state, report_to_json, series_to_csv,
    series_to_json,
};
use anyonic::verify::run_suite;
use anyonic::{copy_series, locality_certificate, measure_report, n_copy, optimize_chsh, ChshBudget, SchmidtState};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_VALIDATION: u8 = 1;
const EXIT_SUITE_FAILURE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "anyonic", version, about = "Entanglement measures and CHSH tests for Fibonacci-anyon states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args, Debug)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; `series` defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// AEE, AREE, ACE and CE of a state.
    Measures {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Per-copy measures for n = 1..=max-n.
    Series {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 12)]
        max_n: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Maximal CHSH value of the joint n-copy state.
    Chsh {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        copies: u32,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Separable decomposition of the Ω image of the n-copy state, or a refusal.
    Certify {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 1)]
        copies: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Seeded invariant suite.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Validation(String),
    Usage(String),
    Suite,
}

impl From<anyonic::Error> for Failure {
    fn from(e: anyonic::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

fn load_state(path: &Path) -> Result<SchmidtState, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_state(&text)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Validation(format!("cannot write to stdout: {e}")))
        }
    }
}

fn json_only(command: &str, format: Option<Format>) -> Result<(), Failure> {
    match format {
        Some(Format::Csv) => Err(Failure::Usage(format!("`{command}` only supports --format json"))),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Measures { state, output } => {
            let report = measure_report(&load_state(&state)?)?;
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Json => report_to_json(&report),
                Format::Csv => format!(
                    "aee,aree,ace,ce\n{}",
                    [report.aee, report.aree, report.ace, report.ce].map(format_number).join(",")
                ),
            };
            emit(&output.out, &text)
        }
        Command::Series { state, max_n, output } => {
            let series = copy_series(&load_state(&state)?, max_n)?;
            let text = match output.format.unwrap_or(Format::Csv) {
                Format::Csv => series_to_csv(&series),
                Format::Json => series_to_json(&series),
            };
            emit(&output.out, &text)
        }
        Command::Chsh {
            state,
            copies,
            grid,
            restarts,
            seed,
            output,
        } => {
            json_only("chsh", output.format)?;
            let budget = ChshBudget {
                grid,
                restarts,
                seed,
                ..ChshBudget::default()
            };
            let result = optimize_chsh(&load_state(&state)?, copies, &budget)?;
            emit(&output.out, &chsh_to_json(&result))
        }
        Command::Certify { state, copies, output } => {
            json_only("certify", output.format)?;
            let joint = n_copy(&load_state(&state)?, copies)?;
            let cert = locality_certificate(&joint)?;
            emit(&output.out, &certificate_to_json(&cert, copies))
        }
        Command::Verify { seed, cases, out } => {
            let report = run_suite(seed, cases);
            let mut text = String::new();
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
            }
            text.push_str(&format!("passed {}, failed {}\n", report.passed(), report.failed()));
            emit(&out, &text)?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Suite)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Suite) => ExitCode::from(EXIT_SUITE_FAILURE),
    }
}

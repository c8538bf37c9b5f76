//! `crjet`: invariants of nonminimal hypersurfaces, map identity checks and
//! singular ODE series from TOML input files.
//!
//! Exit codes: 0 success, 1 validation failure, 2 invariant violation,
//! 3 parse or I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use crjet_core::input;
use crjet_core::report::{self, Outcome};
use crjet_core::{corpus, Error};

#[derive(Parser, Debug)]
#[command(name = "crjet", version, about = "Exact CR invariants, map identities and Briot-Bouquet series")]
struct Cli {
    /// Override the truncation order of every hypersurface read.
    #[arg(long, global = true, value_name = "N")]
    trunc: Option<u32>,
    /// Write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Print the JSON report on stdout instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants of a hypersurface file.
    Report { file: PathBuf },
    /// Containment and frame identities for a map file.
    CheckMap { file: PathBuf },
    /// Formal solution of a singular system file.
    BbSolve {
        file: PathBuf,
        /// Solve order (overrides the file).
        #[arg(long, value_name = "K")]
        order: Option<u32>,
        /// Compare against numeric integration started at ±t0.
        #[arg(long, value_name = "T0", allow_negative_numbers = true)]
        oracle: Option<f64>,
    },
    /// Assemble and solve a prolonged system file.
    Prolong {
        file: PathBuf,
        #[arg(long, value_name = "K")]
        order: Option<u32>,
    },
    /// Run the built-in corpus.
    Examples,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Report { .. } => "report",
            Command::CheckMap { .. } => "check-map",
            Command::BbSolve { .. } => "bb-solve",
            Command::Prolong { .. } => "prolong",
            Command::Examples => "examples",
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let trunc = cli.trunc.map(|t| t as i32);
    Ok(match &cli.command {
        Command::Report { file } => {
            let hs = input::parse_hypersurface(&input::read_file(file)?, trunc)?;
            report::report_hypersurface(&hs)
        }
        Command::CheckMap { file } => {
            let text = input::read_file(file)?;
            let mf = input::parse_map(&text, trunc, |rel| input::read_relative(file, rel))?;
            report::check_map(&mf.map)
        }
        Command::BbSolve { file, order, oracle } => {
            let sys = input::parse_bb(&input::read_file(file)?, *order)?;
            report::bb_solve(&sys, *oracle)
        }
        Command::Prolong { file, order } => {
            let ps = input::parse_prolong(&input::read_file(file)?, *order)?;
            report::prolong(&ps)
        }
        Command::Examples => corpus::run_examples(),
    })
}

fn write_out(path: &Path, body: &str) -> Result<(), Error> {
    std::fs::write(path, body).map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let outcome = run(&cli).unwrap_or_else(|e| report::error_outcome(cli.command.name(), &e));
    let body = outcome.render_json();
    if let Some(path) = &cli.out {
        if let Err(e) = write_out(path, &body) {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    if cli.json {
        print!("{body}");
    } else if outcome.failure.is_some() {
        eprint!("{}", outcome.text);
    } else {
        print!("{}", outcome.text);
    }
    ExitCode::from(outcome.exit_code() as u8)
}

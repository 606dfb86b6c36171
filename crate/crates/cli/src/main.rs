//! `ispwr`: counting tables, element dumps, D-class reports and the
//! self-verification harness for partial wreath powers of `IS_d`.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 enumeration cap
//! exceeded, 64 usage error.

mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ispwr_core::Error;

const EXIT_MISMATCH: u8 = 1;
const EXIT_CAP: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "ispwr",
    version,
    about = "Partial wreath powers of the symmetric inverse semigroup"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Order, idempotent count, D-class count and |Aut T_k|.
    Count(RunConfig),
    /// Dump every element of wr^k IS_d.
    Enumerate(RunConfig),
    /// Per-D-class statistics, from the formulas or (with --observed) by enumeration.
    Classify(RunConfig),
    /// Check every formula and predicate against brute force.
    Verify(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunConfig {
    /// Degree d of the base semigroup IS_d.
    #[arg(short = 'd', long = "degree", value_parser = clap::value_parser!(u64).range(1..=255))]
    degree: u64,
    /// Number of levels k.
    #[arg(short = 'k', long = "levels", value_parser = clap::value_parser!(u64).range(1..=u64::from(u32::MAX)))]
    levels: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest number of elements (or table rows) that may be enumerated.
    #[arg(long = "max-elements", default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_elements: u64,
    /// Largest universe for the brute-force Green's relation oracle.
    #[arg(long = "oracle-cap", default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    oracle_cap: u64,
    /// Compare formula values with a classification of all elements.
    #[arg(long)]
    observed: bool,
    /// Write to this file instead of standard output.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

impl RunConfig {
    fn degree(&self) -> usize {
        self.degree as usize
    }

    fn levels(&self) -> usize {
        self.levels as usize
    }
}

fn open_output(cfg: &RunConfig) -> io::Result<Box<dyn Write>> {
    Ok(match &cfg.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(command: Command) -> Result<u8, Error> {
    let (cfg, outcome) = match command {
        Command::Count(cfg) => {
            let out = report::count(&cfg);
            (cfg, Ok((out, 0)))
        }
        Command::Enumerate(cfg) => {
            let out = report::enumerate(&cfg);
            (cfg, out.map(|o| (o, 0)))
        }
        Command::Classify(cfg) => {
            let out = report::classify(&cfg);
            (
                cfg,
                out.map(|(o, ok)| (o, if ok { 0 } else { EXIT_MISMATCH })),
            )
        }
        Command::Verify(cfg) => {
            let out = report::verify(&cfg);
            (
                cfg,
                out.map(|(o, ok)| (o, if ok { 0 } else { EXIT_MISMATCH })),
            )
        }
    };
    let (text, code) = outcome?;
    let mut w = open_output(&cfg).map_err(|e| Error::Parse(format!("cannot open output: {e}")))?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::Parse(format!("cannot write output: {e}")))?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e @ Error::EnumerationLimit { .. }) => {
            eprintln!("ispwr: {e}");
            ExitCode::from(EXIT_CAP)
        }
        Err(e) => {
            eprintln!("ispwr: {e}");
            ExitCode::from(EXIT_MISMATCH)
        }
    }
}

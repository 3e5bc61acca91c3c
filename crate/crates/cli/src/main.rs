//! `fleas`: command-line front end for the square-jump toolkit.
//!
//! Exit codes: 0 success, 1 failed check or runtime error, 2 usage error,
//! 3 search suspended with a resumable checkpoint, 4 geometry and algebra
//! disagree.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Overrides;

/// Input the user got wrong; reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// A check ran to completion and did not pass; reported with exit code 1.
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

#[derive(Debug, Parser)]
#[command(name = "fleas", version, about = "Areas reachable by lattice triangles under square jumps")]
struct Cli {
    /// More progress output on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// `key=value` file with defaults for bound, workers, memory_budget,
    /// checkpoint, format and output.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Three points `x1,y1 x2,y2 x3,y3`, or a built-in fixture. Points with a
/// negative first coordinate go after `--`.
#[derive(Debug, Clone, clap::Args)]
pub struct Input {
    #[arg(num_args = 0..)]
    pub points: Vec<String>,
    /// Built-in triangle: G = (0,0),(2,1),(3,2); H = (0,0),(2,0),(4,1).
    #[arg(long, conflicts_with = "points")]
    pub fixture: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Side squares, quadruple, primitivity, parity profile and reduction.
    Analyze {
        #[command(flatten)]
        input: Input,
    },
    /// Enumerate reachable areas up to a bound and list the missed ones.
    Search {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        flags: Overrides,
        /// Continue from the checkpoints in the checkpoint directory.
        #[arg(long)]
        resume: bool,
        /// Comma separated subset of K, K1, K2, K3.
        #[arg(long, value_delimiter = ',')]
        components: Option<Vec<String>>,
        /// Suspend every component after this bucket.
        #[arg(long, hide = true)]
        pause_after: Option<u64>,
    },
    /// Rewrite a word into a single-sign body times a relabeling.
    Normalize {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Replay a word on the points and print one line per step.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a built-in property suite.
    Verify {
        #[arg(long, value_enum)]
        suite: commands::Suite,
    },
    /// Residue conditions and valuation pairs along the orbit.
    Audit {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        flags: Overrides,
        /// Exit 1 when a violation or nonconforming pair is found.
        #[arg(long)]
        strict: bool,
    },
    /// Search every primitive triangle in a small box, one row per orbit.
    Scan {
        #[arg(long)]
        max_coord: i64,
        #[command(flatten)]
        flags: Overrides,
        /// Stop after this many rows; the table is marked truncated.
        #[arg(long)]
        max_rows: Option<usize>,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    if err.downcast_ref::<CheckFailed>().is_some() {
        return 1;
    }
    match err.downcast_ref::<fleas::Error>() {
        Some(fleas::Error::Suspended { .. }) => 3,
        Some(fleas::Error::ModelInconsistency { .. }) => 4,
        Some(
            fleas::Error::PointSyntax(_)
            | fleas::Error::WordSyntax(_)
            | fleas::Error::DegenerateInput(_),
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let config = cli.config.as_deref();
    let result = match cli.command {
        Command::Analyze { input } => commands::analyze(&input),
        Command::Search { input, flags, resume, components, pause_after } => {
            commands::search(&input, config, &flags, resume, components, pause_after)
        }
        Command::Normalize { word } => commands::normalize(&word),
        Command::Simulate { input, word, output } => commands::simulate(&input, &word, output),
        Command::Verify { suite } => commands::verify(suite),
        Command::Audit { input, flags, strict } => commands::audit(&input, config, &flags, strict),
        Command::Scan { max_coord, flags, max_rows } => commands::scan(max_coord, config, &flags, max_rows),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fleas: {e:#}");
            if let Some(fleas::Error::Suspended { .. }) = e.downcast_ref() {
                eprintln!("fleas: rerun with --resume to continue");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

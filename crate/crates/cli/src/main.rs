//! `pagraph`: generate preferential-attachment graphs, compute their degree
//! statistics and estimate the initial attractiveness `a` two ways.

mod analyze;
mod fit;
mod generate;
mod output;
mod theory;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pagraph_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("all requested fits diverged")]
    AllDiverged,
    #[error("verification failed: {0} differs from a fresh derivation")]
    Mismatch(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use pagraph_core::Error as E;
        match self {
            CliError::Core(E::Io(_)) | CliError::Io(_) => 4,
            CliError::Core(E::Fit(_)) | CliError::AllDiverged => 3,
            CliError::Core(_) | CliError::Usage(_) => 2,
            CliError::Mismatch(_) | CliError::Internal(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pagraph",
    version,
    about = "Preferential-attachment graphs and two-way estimation of initial attractiveness"
)]
struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true, env = "PAGRAPH_THREADS")]
    threads: Option<usize>,

    /// After writing, derive every output again and compare with the files.
    #[arg(long, global = true)]
    verify: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph from the BO, GDS or HK model.
    Generate(generate::GenerateArgs),
    /// Write degree, edge and neighbour-degree tables for a graph.
    Analyze(analyze::AnalyzeArgs),
    /// Estimate a1 and a2 from the tables written by `analyze`.
    Fit(fit::FitArgs),
    /// Resampling error of one estimator.
    Bootstrap(fit::BootstrapArgs),
    /// Closed-form expectations and numerical checks.
    #[command(subcommand)]
    Theory(theory::TheoryCommand),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Analyze(_) => "analyze",
            Command::Fit(_) => "fit",
            Command::Bootstrap(_) => "bootstrap",
            Command::Theory(t) => t.name(),
        }
    }

    fn run(&self) -> Result<output::Run, CliError> {
        match self {
            Command::Generate(a) => generate::run(a),
            Command::Analyze(a) => analyze::run(a),
            Command::Fit(a) => fit::run_fit(a),
            Command::Bootstrap(a) => fit::run_bootstrap(a),
            Command::Theory(t) => theory::run(t),
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let started = Instant::now();
    let run = cli.command.run()?;
    let manifest = output::write_run(&run, cli.command.name(), started)?;
    // a closed stdout must not abort a run whose files are already written
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}manifest: {}", run.summary, manifest.display());
    if cli.verify {
        let n = output::verify(&cli.command.run()?)?;
        let _ = writeln!(out, "verified {n} file(s)");
    }
    if run.all_diverged {
        return Err(CliError::AllDiverged);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

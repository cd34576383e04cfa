//! `vdelta`: JSON-in, JSON-out front end for the valuated Δ-matroid tools.
//!
//! Exit codes: 0 when the property holds or the computation finished, 1 when
//! the property fails (the report carries the certificate), 2 on bad input.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;
use vdelta_core::exec::Exec;

#[derive(Debug, Parser)]
#[command(name = "vdelta", version, about = "Exact valuated Δ-matroid checks and principal-minor representations")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input JSON: a file path, `-` for stdin, or inline JSON text.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Seed for randomized commands (mandatory there).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of random trials.
    #[arg(long, global = true, default_value_t = 1000)]
    trials: u64,
    /// Worker threads; 1 runs sequentially, 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Minimum Hamming length reported by `edges`.
    #[arg(long, global = true, default_value_t = 3)]
    min_len: usize,
    /// Cell enumeration strategy for `cells` (default: exhaustive up to n = 4).
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Decide whether a subset function is a valuated Δ-matroid.
    Check,
    /// List the edges of the induced subdivision of length at least `--min-len`.
    Edges,
    /// Maximal cells of the induced subdivision.
    Cells,
    /// Dimension of the secondary cone of a finite subset function.
    ConeDim,
    /// Exchange axiom for a basis family or the domain of a subset function.
    DomCheck,
    /// Rank function and negated rank valuation of a Δ-matroid.
    Rank,
    /// Principal minors of a matrix and their valuations.
    Minors,
    /// Rayleigh difference of the determinantal polynomial.
    Rayleigh,
    /// Verify the factorization of a Rayleigh difference.
    Factorize,
    /// Realize a three-element valuated Δ-matroid by a Hermitian matrix over Q(t).
    Realize3,
    /// Principal-minor valuations of a maximal isotropic subspace.
    Isotropic,
    /// Convex circuit representations of the cube centre, grouped into orbits.
    Circuits,
    /// Seeded random search for counterexamples to the rank-one extensions.
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Bfs,
}

/// A finished command: the JSON report and the exit code.
pub struct Report {
    pub code: u8,
    pub body: Value,
}

/// Input errors end the run with exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

impl Cli {
    fn exec(&self) -> Exec {
        if self.jobs == 1 {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

fn configure_threads(jobs: usize) {
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        // Only fails if a global pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}

fn write_report(cli: &Cli, body: &Value) -> Result<(), InputError> {
    let mut text = serde_json::to_string_pretty(body)?;
    text.push('\n');
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(cli.jobs);
    let outcome = commands::run(&cli).and_then(|report| write_report(&cli, &report.body).map(|_| report.code));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

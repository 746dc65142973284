//! `obliv-kand`: reproducible experiments for oblivious Max-kAND algorithms.
//!
//! Exit codes: 0 success, 2 user error, 3 solver failure, 4 a check failed.

mod cmd;
mod error;
mod spec;

use clap::{Parser, Subcommand};
use error::CliError;

#[derive(Parser)]
#[command(name = "obliv-kand", version, about = "Approximation ratios, certificates and streaming estimators for oblivious Max-kAND")]
struct Cli {
    /// Worker threads for grid search and multi-seed runs (default: logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// LP feasibility tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact approximation ratio of one oblivious algorithm via the factor-revealing LP.
    Ratio(cmd::ratio::RatioArgs),
    /// Reproduce the concrete-ratio table for a range of k.
    Table(cmd::ratio::TableArgs),
    /// Grid search over the two-piece linear rounding family.
    Grid(cmd::ratio::GridArgs),
    /// Solve the strict core system and certify a ratio above α*_k.
    Certify(cmd::certify::CertifyArgs),
    /// Exact check of the Bernoulli-type inequality family.
    Bernoulli(cmd::certify::BernoulliArgs),
    /// Run a streaming estimator over many seeds.
    Stream(cmd::stream::StreamArgs),
    /// Generate a random unit-weight instance.
    Gen(cmd::stream::GenArgs),
    /// Brute-force value and oblivious value of an instance.
    Value(cmd::instance::ValueArgs),
    /// Snapshot (pattern distribution) of an instance.
    Snapshot(cmd::instance::SnapshotArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let tol = cli.tol;
    match cli.command {
        Command::Ratio(a) => cmd::ratio::ratio(a, tol),
        Command::Table(a) => cmd::ratio::table(a, tol),
        Command::Grid(a) => cmd::ratio::grid(a),
        Command::Certify(a) => cmd::certify::certify(a, tol),
        Command::Bernoulli(a) => cmd::certify::bernoulli(a),
        Command::Stream(a) => cmd::stream::stream(a),
        Command::Gen(a) => cmd::stream::gen(a),
        Command::Value(a) => cmd::instance::value(a),
        Command::Snapshot(a) => cmd::instance::snapshot(a),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use renyivar_cli::cert::{to_csv, to_json};
use renyivar_cli::{run, CliError, Command, Flags};

/// Rényi divergences, divergence rates and their variational optimizers on
/// finite alphabets. Writes a certificate to standard output.
///
/// Exit codes: 0 = computed and all checks passed, 1 = a check failed,
/// 2 = input error.
#[derive(Parser)]
#[command(name = "renyivar", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Divergence between two distributions (kind iid_divergence).
    Div(Common),
    /// Divergence rate between two stationary chains (kind markov_rate).
    Rate(Common),
    /// Growth rate and Perron data of a nonnegative matrix (kind growth).
    Growth(Common),
    /// Closed-form optimizer of a variational formula.
    Solve(Common),
    /// Check a variational inequality at a given feasible point.
    Certify(Common),
    /// Finite-n convergence reports and random-search falsification.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    file: PathBuf,
    /// Emit JSON (default).
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit two-column CSV instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Tolerance for pass/fail decisions.
    #[arg(long, value_name = "X", value_parser = parse_tol)]
    tol: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Seed for random search.
    #[arg(long, value_name = "K")]
    seed: Option<u64>,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t >= 0.0 => Ok(t),
        _ => Err(format!("`{s}` is not a nonnegative finite number")),
    }
}

fn execute(cli: Cli) -> Result<(String, bool), CliError> {
    let (command, common, seed) = match cli.command {
        Cmd::Div(c) => (Command::Div, c, None),
        Cmd::Rate(c) => (Command::Rate, c, None),
        Cmd::Growth(c) => (Command::Growth, c, None),
        Cmd::Solve(c) => (Command::Solve, c, None),
        Cmd::Certify(c) => (Command::Certify, c, None),
        Cmd::Oracle(o) => (Command::Oracle, o.common, o.seed),
    };
    let input = std::fs::read(&common.file)
        .map_err(|source| CliError::Io { path: common.file.display().to_string(), source })?;
    let cert = run(command, &input, Flags { tol: common.tol, seed })?;
    let text = if common.csv { to_csv(&cert.node)? } else { to_json(&cert.node) };
    Ok((text, cert.pass))
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok((text, pass)) => {
            print!("{text}");
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("renyivar: error: {e}");
            ExitCode::from(2)
        }
    }
}

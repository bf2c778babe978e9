//! Batch front end for `renyivar`: reads a problem file, runs one command,
//! and produces a certificate.
//!
//! Exit codes: 0 when everything computed and every check passed, 1 when a
//! check failed, 2 on input errors.

pub mod cert;
mod commands;
mod error;
pub mod problem;

pub use commands::{run, Certificate, Command, Flags, DEFAULT_N_MAX, DEFAULT_TRIALS, ORACLE_TOLERANCE};
pub use error::{CliError, Result};

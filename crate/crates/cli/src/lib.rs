//! Command-line front end: argument parsing, dispatch and exit codes.
//!
//! Exit status is 0 on success, 1 for user errors (flags, files, invalid
//! parameters) and 2 for numerical failures. Errors go to stderr as
//! `error[<code>]: <message>`.

pub mod commands;
pub mod io;
pub mod manifest;

use std::ffi::OsString;
use std::path::Path;

use clap::Parser;

pub use commands::Cli;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub exit: i32,
}

impl CliError {
    fn user(code: &'static str, message: impl Into<String>) -> Self {
        CliError { code, message: message.into(), exit: 1 }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::user("input", message)
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::user("config", message)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::user("io", format!("{}: {e}", path.display()))
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError { code: "numerical", message: message.into(), exit: 2 }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { code: "internal", message: message.into(), exit: 2 }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)
    }
}

impl From<stablear::Error> for CliError {
    fn from(e: stablear::Error) -> Self {
        use stablear::Error as E;
        let message = e.to_string();
        match e {
            E::Numerical { .. } => CliError::numerical(message),
            E::Internal(_) => CliError::internal(message),
            E::Domain(_) => CliError::user("domain", message),
            E::Input(_) => CliError::user("input", message),
            E::Config(_) => CliError::user("config", message),
            E::SampleSize(_) => CliError::user("sample_size", message),
            E::Boundary(_) => CliError::user("boundary", message),
        }
    }
}

/// Applies `STABLE_AR_THREADS` to the global pool. Results do not depend on
/// the value.
fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("STABLE_AR_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::config(format!("STABLE_AR_THREADS must be a positive integer, got {v:?}")))?;
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match configure_threads().and_then(|_| commands::dispatch(cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit
        }
    }
}

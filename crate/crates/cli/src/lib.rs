//! Library behind the `sicx` binary: argument parsing, command dispatch,
//! file formats and the fiducial catalog.

pub mod catalog;
pub mod commands;
pub mod config;
pub mod files;

use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

pub use commands::Cli;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] sic_core::Error),
}

impl CliError {
    /// A search that ran out of restarts is a failed result, not bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(sic_core::Error::NotFound { .. }) => 1,
            _ => 2,
        }
    }
}

/// Result of a successful dispatch.
pub struct Output {
    /// `false` when a verification failed; the exit code is then 1.
    pub ok: bool,
    pub json: serde_json::Value,
    /// Human-mode text; `None` renders the JSON value as `key: value` lines.
    pub human: Option<String>,
    pub csv: Option<String>,
    pub warnings: Vec<String>,
}

impl Output {
    pub fn new(ok: bool, json: serde_json::Value) -> Self {
        Self { ok, json, human: None, csv: None, warnings: Vec::new() }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code: 0 success, 1 verification failure, 2 usage or input error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match commands::dispatch(cli) {
        Ok((output, format)) => {
            for w in &output.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let text = match format {
                config::Format::Json => files::to_json(&output.json),
                config::Format::Csv => output.csv.clone().unwrap_or_else(|| files::to_json(&output.json)),
                config::Format::Human => output.human.clone().unwrap_or_else(|| commands::render(&output.json)),
            };
            let _ = write!(out, "{text}");
            if output.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

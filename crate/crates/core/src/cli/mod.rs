//! Command-line front end: scenario configs in, tables and reports out.
//!
//! ```text
//! fluidrad [--out-dir DIR] [--seed N] [--threads N] run|modes|validate <config.toml>
//! ```
//!
//! `FLUIDRAD_OUT` sets the default output directory. Exit codes: 0 on
//! success, 2 for configuration errors, 1 for scenario or I/O failures. Errors
//! are also printed to stderr as one JSON object.

pub mod config;
pub mod export;
pub mod run;
pub mod units;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use config::ScenarioConfig;
pub use export::{export_pattern, write_pattern};
pub use run::{run_scenario, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Config,
    Scenario,
    Io,
}

/// Machine-readable failure. `key` names the offending config entry when
/// there is one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub key: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Config,
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Io,
            key: None,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Scenario | ErrorKind::Io => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&serde_json::json!({ "error": self })).expect("error serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(k) => write!(f, "{k}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for CliError {}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        Self {
            kind: ErrorKind::Scenario,
            key: None,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fluidrad", version, about = "Eigenmode fluid-antenna scenarios")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "FLUIDRAD_OUT", default_value = "fluidrad_out")]
    pub out_dir: PathBuf,
    /// Reserved: every scenario is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for grid and sweep evaluation.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenario and write its outputs.
    Run { config: PathBuf },
    /// Write the eigenmode table of the scenario's domain.
    Modes { config: PathBuf },
    /// Check the config and print the resolved form.
    Validate { config: PathBuf },
}

/// Entry point of the binary; returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let mut warnings = Vec::new();
    if cli.seed.is_some() {
        warnings.push("--seed is reserved; all scenarios are deterministic".to_string());
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return fail(&CliError::config("--threads", "thread count must be >= 1"));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            warnings.push(format!("thread pool already initialized: {e}"));
        }
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let result = match &cli.command {
        Command::Validate { config } => ScenarioConfig::load(config)
            .and_then(|c| c.resolved())
            .map(|c| print!("{}", c.to_toml())),
        Command::Run { config } => run::run_file(config, &cli.out_dir, run::Mode::Full, warnings),
        Command::Modes { config } => run::run_file(config, &cli.out_dir, run::Mode::ModesOnly, warnings),
    };
    match result {
        Ok(()) => 0,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> i32 {
    eprintln!("{}", e.to_json());
    e.exit_code()
}

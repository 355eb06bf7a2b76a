//! Command-line experiments on matrix semigroups.
//!
//! Every run first writes `manifest.json` into the output directory, with
//! the parameters and the generator file contents; `projdyn replay` re-runs
//! it. Outputs depend only on the recorded parameters, not on the number of
//! threads.

pub mod args;
pub mod commands;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};

pub use args::{Cli, Command};
pub use commands::{cmd_hypotheses, cmd_limitset, cmd_shell, cmd_spectrum, cmd_torus, cmd_walk};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] projdyn_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.name(),
            CliError::Io { .. } => "IoError",
            CliError::Json(_) => "JsonError",
            CliError::Csv(_) => "CsvError",
            CliError::Usage(_) => "UsageError",
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub command: Command,
    /// Contents of the generator file at the time of the run.
    pub generators: String,
}

impl Manifest {
    pub fn new(command: Command, generators: String) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            generators,
        }
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            EXIT_ERROR
        }
    }
}

/// Parses `args` (program name first) and runs them.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() { EXIT_ERROR } else { EXIT_OK }
        }
    }
}

fn execute(command: Command) -> CliResult<i32> {
    let (command, generators, threads) = match command {
        Command::Replay(r) => {
            let manifest = Manifest::read(&r.manifest)?;
            let mut command = manifest.command;
            let out = r.out.unwrap_or_else(|| {
                r.manifest.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf)
            });
            if let Some(c) = command.common_mut() {
                c.out = out;
                c.threads = r.threads;
            }
            (command, manifest.generators, r.threads)
        }
        other => {
            let common = other.common().expect("experiment command");
            let text = std::fs::read_to_string(&common.gens).map_err(|e| CliError::io(&common.gens, e))?;
            let threads = common.threads;
            (other, text, threads)
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(&command, &generators))
}

fn run_experiment(command: &Command, generators: &str) -> CliResult<i32> {
    let out = &command.common().expect("experiment command").out;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    output::write_json(&out.join(MANIFEST_FILE), &Manifest::new(command.clone(), generators.to_string()))?;
    let gens = projdyn_core::GeneratorSet::parse(generators)?;
    match command {
        Command::Hypotheses(a) => cmd_hypotheses(a, &gens),
        Command::Limitset(a) => cmd_limitset(a, &gens),
        Command::Spectrum(a) => cmd_spectrum(a, &gens),
        Command::Walk(a) => cmd_walk(a, &gens),
        Command::Torus(a) => cmd_torus(a, &gens),
        Command::Shell(a) => cmd_shell(a, &gens),
        Command::Replay(_) => unreachable!("resolved above"),
    }
}

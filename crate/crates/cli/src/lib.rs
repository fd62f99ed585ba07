//! Batch driver: `compute`, `verify` and `probe` over fraclps-core.

pub mod compute;
pub mod config;
pub mod error;
pub mod output;
pub mod probe;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use error::{CliError, Exit};

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "FRACLPS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fraclps", version, about = "Fractional Littlewood-Paley-Stein operators on periodic grids")]
pub struct Cli {
    /// Plain-text key=value configuration; omitted keys take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, overriding the `out` key.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Random seed, overriding the `seed` key.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply one operator to an input field.
    Compute {
        /// semigroup, fracderiv, gfun, area or gstar.
        #[arg(long, value_name = "NAME")]
        kind: String,
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
    },
    /// Run a verification suite and print the pass/fail table.
    Verify {
        /// semigroup, fracderiv, squarefuncs, hilbert or all.
        #[arg(long, value_name = "NAME", default_value = "all")]
        suite: String,
    },
    /// Run a cotype, type or Hilbert convergence probe.
    Probe {
        /// cotype, type or hilbert-convergence.
        #[arg(long, value_name = "NAME")]
        kind: String,
        /// Hilbert sample CSV for hilbert-convergence.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
    },
}

/// Loads the config and applies the command-line overrides.
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Sizes the global worker pool from `FRACLPS_THREADS` once per process.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::config(format!("{THREADS_VAR} must be a positive integer, got `{v}`")))?;
    // a pool that already exists keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Exit, CliError> {
    let cfg = effective_config(cli)?;
    match &cli.command {
        Command::Compute { kind, input } => compute::run(&cfg, kind, input, stdout),
        Command::Verify { suite } => verify::run(&cfg, suite, stdout, stderr),
        Command::Probe { kind, input } => probe::run(&cfg, kind, input.as_deref(), stdout),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Config.code() } else { Exit::Ok.code() };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let threads = std::env::var(THREADS_VAR).ok();
    let result = configure_threads(threads.as_deref()).and_then(|_| execute(&cli, stdout, stderr));
    match result {
        Ok(exit) => exit.code(),
        Err(e) => {
            let _ = writeln!(stderr, "fraclps: {e}");
            e.exit.code()
        }
    }
}

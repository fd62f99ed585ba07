//! Atomic file output and metadata sidecars.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::config::{fmt_f64, RunConfig};
use crate::error::CliError;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::input(format!("cannot write {}: {e}", path.display()))
}

/// Writes `bytes` to `dir/name` through a temporary file in `dir` and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let target = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| io_err(&target, e))?;
    tmp.write_all(bytes).map_err(|e| io_err(&target, e))?;
    tmp.as_file().sync_all().map_err(|e| io_err(&target, e))?;
    tmp.persist(&target).map_err(|e| io_err(&target, e.error))?;
    Ok(target)
}

/// Renders into a buffer with a core writer, then writes atomically.
pub fn write_with(
    dir: &Path,
    name: &str,
    render: impl FnOnce(&mut Vec<u8>) -> fraclps_core::Result<()>,
) -> Result<PathBuf, CliError> {
    let mut buf = Vec::new();
    render(&mut buf)?;
    write_atomic(dir, name, &buf)
}

/// `key=value` lines stored next to an output as `<name>.meta`.
#[derive(Debug, Clone, Default)]
pub struct Sidecar {
    entries: Vec<(String, String)>,
}

impl Sidecar {
    /// Provenance shared by every output of a run: versions, config hash and budgets.
    pub fn new(cfg: &RunConfig, command: &str, kind: &str) -> Self {
        let mut s = Self::default();
        s.push("tool", "fraclps");
        s.push("tool_version", env!("CARGO_PKG_VERSION"));
        s.push("core_version", fraclps_core::VERSION);
        s.push("command", command);
        s.push("kind", kind);
        s.push("config_sha256", cfg.hash());
        s.push("subordination_nodes", cfg.subordination_nodes.to_string());
        s.push("subordination_tolerance", fmt_f64(cfg.subordination_tolerance));
        s.push("sw_near", cfg.sw_near.to_string());
        s.push("sw_far", cfg.sw_far.to_string());
        s.push("sw_tolerance", fmt_f64(cfg.sw_tolerance));
        s.push("seed", cfg.seed.to_string());
        s
    }

    pub fn push(&mut self, key: &str, value: impl Into<String>) {
        self.entries.push((key.to_string(), value.into()));
    }

    pub fn extend(&mut self, entries: impl IntoIterator<Item = (String, String)>) {
        self.entries.extend(entries);
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Writes `<name>.meta` beside `name`.
    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf, CliError> {
        write_atomic(dir, &format!("{name}.meta"), self.render().as_bytes())
    }
}

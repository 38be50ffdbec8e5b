//! Output files and their reproducibility sidecars.
//!
//! Every emitted file gets a `<name>.meta.json` sidecar carrying the artifact
//! version, the subcommand, and the fully-resolved config echo; re-running
//! the echoed config reproduces the run byte for byte.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
struct Sidecar<'a> {
    artifact_version: &'a str,
    command: &'a str,
    config: &'a RunConfig,
}

pub struct OutputDir {
    dir: PathBuf,
    command: &'static str,
    config: RunConfig,
}

impl OutputDir {
    pub fn new(dir: &Path, command: &'static str, config: &RunConfig) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            command,
            config: config.clone(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Write a file plus its sidecar.
    pub fn write(&self, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
        let sidecar = Sidecar {
            artifact_version: ARTIFACT_VERSION,
            command: self.command,
            config: &self.config,
        };
        let meta = self.dir.join(format!("{name}.meta.json"));
        let mut body = serde_json::to_string_pretty(&sidecar)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        body.push('\n');
        std::fs::write(&meta, body)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", meta.display())))?;
        Ok(path)
    }

    pub fn write_str(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        self.write(name, contents.as_bytes())
    }
}

/// Build a CSV body from a header and rows of already-formatted fields.
pub fn csv_body(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::with_capacity(rows.len() * 32 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Shortest-round-trip float formatting; infinities render as inf/-inf and
/// parse back with Rust's standard parser.
pub fn fmt(v: f64) -> String {
    format!("{v}")
}

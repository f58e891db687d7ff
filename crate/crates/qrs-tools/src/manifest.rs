//! Atomic output files and the run manifest written next to them.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Result, ToolError};

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Write `bytes` to `path` through a temporary file in the same directory,
/// renamed into place once complete: readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| ToolError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| ToolError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| ToolError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| ToolError::io(path, e))?;
    tmp.persist(path).map_err(|e| ToolError::io(path, e.error))?;
    Ok(())
}

/// A file consumed or produced by a run, with its content hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileRecord {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileRecord {
    pub fn of(path: &Path, bytes: &[u8]) -> Self {
        FileRecord { path: path.to_path_buf(), sha256: sha256_hex(bytes) }
    }
}

/// Everything needed to replay a run: the command line, hashed inputs,
/// seeds, tool version, hashed outputs and derived results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub version: String,
    pub inputs: Vec<FileRecord>,
    pub seeds: BTreeMap<String, u64>,
    pub outputs: Vec<FileRecord>,
    pub results: BTreeMap<String, serde_json::Value>,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>) -> Self {
        RunManifest {
            command: command.to_string(),
            args,
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            seeds: BTreeMap::new(),
            outputs: Vec::new(),
            results: BTreeMap::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.wall_time_s = elapsed.as_secs_f64();
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// `<output>.manifest.json` next to the primary output.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".manifest.json");
        output.with_file_name(name)
    }
}

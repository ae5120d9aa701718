use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use exception_sieve_core::Capacity;

#[derive(Debug, Clone, Serialize)]
pub struct Phase {
    pub name: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub path: PathBuf,
    /// FNV-1a 64, lowercase hex.
    pub checksum: String,
}

impl FileRecord {
    pub fn new(path: &Path, sum: u64) -> Self {
        FileRecord {
            path: path.to_path_buf(),
            checksum: format!("{sum:016x}"),
        }
    }
}

/// Provenance of one invocation, written beside `--out` as
/// `<out>.manifest.json`. Re-running `argv` reproduces the outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub argv: Vec<String>,
    pub parameters: serde_json::Value,
    pub capacity: Capacity,
    pub segment_len: usize,
    pub workers: usize,
    pub phases: Vec<Phase>,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
}

/// Wall-clock timer for named phases.
pub struct Timer {
    pub phases: Vec<Phase>,
}

impl Timer {
    pub fn new() -> Self {
        Timer { phases: Vec::new() }
    }

    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.phases.push(Phase {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

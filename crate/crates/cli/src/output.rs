//! Output files and the run manifest. Every file is written to a temporary sibling and renamed.

use serde::Serialize;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub const SCHEMA_VERSION: u32 = 1;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

#[derive(Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub tool_version: &'static str,
    pub outputs: Vec<String>,
    pub summary: Value,
    pub started_unix_s: u64,
    pub wall_clock_s: f64,
}

/// Collects the files of one run and writes `PREFIX.manifest.json` last.
pub struct Run {
    prefix: PathBuf,
    command: String,
    params: Value,
    seed: Option<u64>,
    outputs: Vec<String>,
    started: Instant,
    started_unix: u64,
}

impl Run {
    pub fn new(prefix: &Path, command: &str, params: Value, seed: Option<u64>) -> Self {
        Run {
            prefix: prefix.to_path_buf(),
            command: command.to_string(),
            params,
            seed,
            outputs: Vec::new(),
            started: Instant::now(),
            started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }

    fn path(&self, ext: &str) -> PathBuf {
        let mut p = self.prefix.as_os_str().to_owned();
        p.push(".");
        p.push(ext);
        PathBuf::from(p)
    }

    pub fn emit(&mut self, ext: &str, bytes: &[u8]) -> std::io::Result<()> {
        let p = self.path(ext);
        write_atomic(&p, bytes)?;
        self.outputs.push(p.display().to_string());
        Ok(())
    }

    pub fn finish(self, summary: Value) -> std::io::Result<PathBuf> {
        let p = self.path("manifest.json");
        let m = Manifest {
            schema_version: SCHEMA_VERSION,
            command: self.command,
            params: self.params,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            outputs: self.outputs,
            summary,
            started_unix_s: self.started_unix,
            wall_clock_s: self.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        write_atomic(&p, text.as_bytes())?;
        Ok(p)
    }
}

//! Run directories, manifests and CSV output.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Everything that determines the results of a run; hashed to name the directory.
#[derive(Debug, Clone, Serialize)]
pub struct RunKey<'a> {
    pub command: &'a str,
    pub seed: u64,
    pub config: &'a RunConfig,
}

impl RunKey<'_> {
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let hash = Sha256::digest(&bytes);
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

pub struct RunDir {
    pub path: PathBuf,
    manifest: Value,
    files: Vec<String>,
    started: Instant,
}

impl RunDir {
    /// Create `<out>/<command>-<hash>` and write an incomplete manifest.
    pub fn create(out: &Path, key: &RunKey, threads: Option<usize>) -> io::Result<Self> {
        let path = out.join(format!("{}-{}", key.command, key.digest()));
        fs::create_dir_all(&path)?;
        let manifest = json!({
            "status": "incomplete",
            "command": key.command,
            "seed": key.seed,
            "threads": threads.unwrap_or_else(rayon::current_num_threads),
            "config": key.config,
            "versions": {
                "toral-cli": env!("CARGO_PKG_VERSION"),
                "toral-core": toral_core::VERSION,
            },
        });
        let dir = Self {
            path,
            manifest,
            files: Vec::new(),
            started: Instant::now(),
        };
        dir.write_manifest()?;
        Ok(dir)
    }

    fn write_manifest(&self) -> io::Result<()> {
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        fs::write(self.path.join("manifest.json"), text + "\n")
    }

    pub fn file(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.path.join(name)
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
        let mut w = csv::Writer::from_path(self.file(name))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> io::Result<()> {
        let text = serde_json::to_string_pretty(value).expect("report serializes");
        fs::write(self.file(name), text + "\n")
    }

    /// Mark the run complete (or failed) with its verdict and timing.
    pub fn finish(mut self, status: &str, verdict: Value) -> io::Result<PathBuf> {
        let m = self.manifest.as_object_mut().expect("manifest is an object");
        m.insert("status".into(), json!(status));
        m.insert("wall_time_s".into(), json!(self.started.elapsed().as_secs_f64()));
        m.insert("files".into(), json!(self.files));
        m.insert("verdict".into(), verdict);
        self.write_manifest()?;
        Ok(self.path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unfinished_run_stays_incomplete() {
        let tmp = std::env::temp_dir().join(format!("toral-run-{}", std::process::id()));
        let cfg = RunConfig::parse("[map]\nmatrix = [[2, 1], [1, 1]]\n[params]\nsets = [{ p = -1.0, s = 1.0 }]\n").unwrap();
        let key = RunKey {
            command: "bounds",
            seed: 0,
            config: &cfg,
        };
        let dir = RunDir::create(&tmp, &key, Some(1)).unwrap();
        let path = dir.path.clone();
        drop(dir);
        let m: Value = serde_json::from_str(&fs::read_to_string(path.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m["status"], "incomplete");
        assert_eq!(key.digest().len(), 16);
        fs::remove_dir_all(&tmp).unwrap();
    }
}

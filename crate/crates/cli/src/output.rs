//! Atomic artifact writing and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ergm_core::RNG_ALGORITHM;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_sha256: String,
    pub seeds: Vec<u64>,
    pub rng: String,
    pub version: String,
    pub files: Vec<ManifestEntry>,
}

/// Writes files into one directory and records them for the manifest.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    config_sha256: String,
    config_json: serde_json::Value,
    seeds: Vec<u64>,
    entries: Vec<ManifestEntry>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, config_json: &str, seeds: Vec<u64>) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_sha256: sha256_hex(config_json.as_bytes()),
            config_json: serde_json::from_str(config_json)?,
            seeds,
            entries: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn config_sha256(&self) -> &str {
        &self.config_sha256
    }

    fn seed_list(&self) -> String {
        self.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
    }

    /// Writes through a temporary sibling and renames into place.
    fn write_atomic(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        {
            let mut f = fs::File::create(&tmp).with_context(|| format!("cannot write {}", tmp.display()))?;
            f.write_all(bytes)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &target).with_context(|| format!("cannot move output into {}", target.display()))?;
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    /// JSON wrapped with the config, its hash, the seeds and the RNG name.
    pub fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<()> {
        let doc = serde_json::json!({
            "config_sha256": self.config_sha256,
            "seeds": self.seeds,
            "rng": RNG_ALGORITHM,
            "config": self.config_json,
            "result": result,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.write_atomic(name, text.as_bytes())
    }

    /// CSV preceded by a `#` provenance line.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<()> {
        let text = format!(
            "# config_sha256={} seeds={} rng={}\n{body}",
            self.config_sha256,
            self.seed_list(),
            RNG_ALGORITHM
        );
        self.write_atomic(name, text.as_bytes())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        self.write_atomic(name, body.as_bytes())
    }

    /// Writes `manifest.json` and returns it.
    pub fn finish(mut self, command: &str) -> Result<Manifest> {
        let manifest = Manifest {
            command: command.to_string(),
            config_sha256: self.config_sha256.clone(),
            seeds: self.seeds.clone(),
            rng: RNG_ALGORITHM.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            files: self.entries.clone(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        self.write_atomic("manifest.json", text.as_bytes())?;
        Ok(manifest)
    }
}

/// Quotes a CSV field when it contains a comma, quote or line break.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting() {
        assert_eq!(csv_field("abc"), "abc");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn writes_and_lists_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::new(dir.path(), "{\"a\":1}", vec![3, 4]).unwrap();
        w.csv("t.csv", "x\n1\n").unwrap();
        w.json("r.json", &serde_json::json!({"v": 2})).unwrap();
        let m = w.finish("test").unwrap();
        assert_eq!(m.files.len(), 2);
        let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert!(csv.starts_with("# config_sha256="));
        assert!(csv.contains("seeds=3;4 rng=ChaCha8\nx\n1\n"));
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
        assert_eq!(json["result"]["v"], 2);
        assert_eq!(json["config"]["a"], 1);
        assert!(dir.path().join("manifest.json").exists());
        assert!(!dir.path().join(".t.csv.tmp").exists());
    }
}

//! In-memory output sets and their create-only commit to disk.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST_NAME: &str = "manifest.json";

/// Files produced by one command, kept in memory until every computation
/// has succeeded.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

/// Buffered CSV table. Floats use the shortest round-trip representation.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

impl Outputs {
    pub fn table(&mut self, name: &str, table: Table) {
        self.files.push((name.to_string(), table.into_bytes()));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("output serializes");
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
    }

    pub fn bytes(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    /// Write every file plus a manifest. A new directory is assembled under
    /// a temporary name and renamed into place, so a failed run leaves
    /// nothing behind; an existing directory is only touched with `force`.
    pub fn commit(self, dir: &Path, force: bool, manifest: ManifestInputs<'_>) -> Result<RunManifest, CliError> {
        let exists = dir.exists();
        if exists && !force {
            return Err(CliError::Usage(format!("{} already exists; pass --force to overwrite", dir.display())));
        }
        let entries = self
            .files
            .iter()
            .map(|(name, bytes)| OutputEntry { name: name.clone(), bytes: bytes.len() as u64, sha256: sha256_hex(bytes) })
            .collect();
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: manifest.command.to_string(),
            config_sha256: sha256_hex(manifest.config_json.as_bytes()),
            timestamp: timestamp(),
            outputs: entries,
        };
        let mut manifest_bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        manifest_bytes.push(b'\n');

        let target = if exists { dir.to_path_buf() } else { staging_dir(dir)? };
        let result = (|| -> std::io::Result<()> {
            for (name, bytes) in &self.files {
                fs::write(target.join(name), bytes)?;
            }
            fs::write(target.join(MANIFEST_NAME), &manifest_bytes)?;
            if !exists {
                fs::rename(&target, dir)?;
            }
            Ok(())
        })();
        if let Err(e) = result {
            if !exists {
                let _ = fs::remove_dir_all(&target);
            }
            return Err(CliError::Infra(format!("writing {}: {e}", dir.display())));
        }
        Ok(manifest)
    }
}

pub struct ManifestInputs<'a> {
    pub command: &'a str,
    pub config_json: &'a str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` when set, so that
    /// reproducible builds get identical manifests.
    pub timestamp: u64,
    pub outputs: Vec<OutputEntry>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(dir.join(MANIFEST_NAME))?;
        serde_json::from_str(&text).map_err(|e| CliError::Infra(format!("bad manifest: {e}")))
    }

    /// Names of outputs whose on-disk checksum differs from the manifest.
    pub fn mismatches(&self, dir: &Path) -> Result<Vec<String>, CliError> {
        let mut bad = Vec::new();
        for entry in &self.outputs {
            let bytes = fs::read(dir.join(&entry.name))?;
            if sha256_hex(&bytes) != entry.sha256 {
                bad.push(entry.name.clone());
            }
        }
        Ok(bad)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.trim().parse().ok()) {
        return t;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn staging_dir(dir: &Path) -> Result<PathBuf, CliError> {
    let parent = match dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    if !parent.is_dir() {
        return Err(CliError::Usage(format!("parent directory {} does not exist", parent.display())));
    }
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let staging = parent.join(format!(".{name}.partial-{}", std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir(&staging)?;
    Ok(staging)
}

/// Shortest representation that parses back to the same `f64`.
pub fn f(x: f64) -> String {
    format!("{x}")
}

pub fn opt_f(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

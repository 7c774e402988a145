//! Content hashes and per-stage provenance stamps.
//!
//! Each stage writes `stamps/<stage>.json` recording the hash of everything
//! it consumed and the hash of everything it wrote. Downstream stages take
//! the upstream output hash as part of their own input hash, forming a chain.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::failure::{Failure, Outcome};

/// Length-prefixed SHA-256 over a sequence of fields.
#[derive(Clone, Default)]
pub struct ContentHash(Sha256);

impl ContentHash {
    pub fn new(domain: &str) -> Self {
        ContentHash(Sha256::new()).field(domain.as_bytes())
    }

    pub fn field(mut self, bytes: &[u8]) -> Self {
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
        self
    }

    pub fn text(self, s: &str) -> Self {
        self.field(s.as_bytes())
    }

    pub fn file(self, path: &Path, label: &str) -> Outcome<Self> {
        let bytes =
            std::fs::read(path).map_err(|e| Failure::incomplete(format!("cannot read {}: {e}", path.display())))?;
        Ok(self.text(label).field(&bytes))
    }

    pub fn hex(self) -> String {
        hex::encode(self.0.finalize())
    }
}

/// Hash of the regular files directly inside `dir`, by name order.
pub fn hash_dir(dir: &Path) -> Outcome<String> {
    let mut names = list_files(dir)?;
    names.sort();
    let mut h = ContentHash::new("dir");
    for name in &names {
        h = h.file(&dir.join(name), name)?;
    }
    Ok(h.hex())
}

pub fn list_files(dir: &Path) -> Outcome<Vec<String>> {
    let rd = std::fs::read_dir(dir).map_err(|e| Failure::incomplete(format!("cannot list {}: {e}", dir.display())))?;
    let mut names = Vec::new();
    for entry in rd {
        let entry = entry.map_err(|e| Failure::incomplete(format!("{}: {e}", dir.display())))?;
        if entry.file_type().map(|t| t.is_file()).unwrap_or(false) {
            names.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    Ok(names)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stamp {
    pub stage: String,
    pub input_hash: String,
    pub output_hash: String,
    #[serde(default)]
    pub details: BTreeMap<String, String>,
}

pub fn stamp_path(dataset_dir: &Path, stage: &str) -> PathBuf {
    dataset_dir.join("stamps").join(format!("{stage}.json"))
}

impl Stamp {
    pub fn write(&self, dataset_dir: &Path) -> Outcome<()> {
        let path = stamp_path(dataset_dir, &self.stage);
        let mut text = serde_json::to_string_pretty(self).expect("stamp serializes");
        text.push('\n');
        std::fs::create_dir_all(path.parent().expect("stamp has a parent"))
            .and_then(|_| std::fs::write(&path, text))
            .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))
    }

    /// `None` when the stamp does not exist.
    pub fn read(dataset_dir: &Path, stage: &str) -> Outcome<Option<Stamp>> {
        let path = stamp_path(dataset_dir, stage);
        match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)
                .map(Some)
                .map_err(|e| Failure::incomplete(format!("corrupt stamp {}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Failure::incomplete(format!("cannot read {}: {e}", path.display()))),
        }
    }

    /// Reads a stamp that must exist.
    pub fn require(dataset_dir: &Path, stage: &str) -> Outcome<Stamp> {
        Self::read(dataset_dir, stage)?.ok_or_else(|| {
            Failure::incomplete(format!(
                "{} has not been produced yet: run the `{}` stage first",
                stamp_path(dataset_dir, stage).display(),
                stage.split('_').next().unwrap_or(stage)
            ))
        })
    }

    pub fn detail(&self, key: &str) -> Outcome<&str> {
        self.details
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Failure::incomplete(format!("stamp `{}` lacks `{key}`", self.stage)))
    }
}

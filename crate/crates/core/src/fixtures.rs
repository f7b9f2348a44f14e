//! Checksummed manifest of the shipped test data.
//!
//! `manifest.toml` lists one `[[entries]]` table per file:
//!
//! ```toml
//! [[entries]]
//! id = "properties"
//! kind = "mapping"
//! path = "mapping/properties.csv"
//! sha256 = "<hex digest of the file bytes>"
//! ```
//!
//! Paths are relative to the manifest.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("{path}: {msg}")]
    Manifest { path: PathBuf, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureKind {
    Conversation,
    Mapping,
    Patch,
    FailureCase,
    PartitionScheme,
    Pbt,
    Table,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub id: String,
    pub kind: FixtureKind,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FixtureManifest {
    #[serde(default)]
    pub entries: Vec<FixtureEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixtureStatus {
    Ok,
    Mismatch { actual: String },
    Missing,
}

impl fmt::Display for FixtureStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureStatus::Ok => f.write_str("ok"),
            FixtureStatus::Mismatch { actual } => write!(f, "checksum-mismatch (actual {actual})"),
            FixtureStatus::Missing => f.write_str("missing"),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl FixtureManifest {
    pub fn load(path: &Path) -> Result<Self, FixtureError> {
        let err = |msg: String| FixtureError::Manifest { path: path.to_path_buf(), msg };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        toml::from_str(&text).map_err(|e| err(e.message().to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), FixtureError> {
        let text = toml::to_string(self).expect("manifest serializes");
        std::fs::write(path, text).map_err(|e| FixtureError::Manifest { path: path.to_path_buf(), msg: e.to_string() })
    }
}

fn status(base: &Path, e: &FixtureEntry) -> FixtureStatus {
    match std::fs::read(base.join(&e.path)) {
        Ok(bytes) => {
            let actual = sha256_hex(&bytes);
            if actual.eq_ignore_ascii_case(&e.sha256) {
                FixtureStatus::Ok
            } else {
                FixtureStatus::Mismatch { actual }
            }
        }
        Err(_) => FixtureStatus::Missing,
    }
}

/// Checks every entry; unreadable files are reported, not fatal.
pub fn verify_fixtures(manifest_path: &Path) -> Result<Vec<(String, FixtureStatus)>, FixtureError> {
    let m = FixtureManifest::load(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    Ok(m.entries.iter().map(|e| (e.id.clone(), status(base, e))).collect())
}

/// Recomputes every checksum in place. Missing files stay as they are and
/// are returned.
pub fn seal_fixtures(manifest_path: &Path) -> Result<Vec<String>, FixtureError> {
    let mut m = FixtureManifest::load(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut missing = Vec::new();
    for e in &mut m.entries {
        match std::fs::read(base.join(&e.path)) {
            Ok(bytes) => e.sha256 = sha256_hex(&bytes),
            Err(_) => missing.push(e.id.clone()),
        }
    }
    m.save(manifest_path)?;
    Ok(missing)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.txt"), "alpha").unwrap();
        std::fs::write(dir.path().join("b.txt"), "beta").unwrap();
        let m = FixtureManifest {
            entries: ["a", "b"]
                .iter()
                .map(|id| FixtureEntry {
                    id: id.to_string(),
                    kind: FixtureKind::Patch,
                    path: format!("{id}.txt"),
                    sha256: String::new(),
                })
                .collect(),
        };
        let path = dir.path().join("manifest.toml");
        m.save(&path).unwrap();
        assert!(seal_fixtures(&path).unwrap().is_empty());
        (dir, path)
    }

    #[test]
    fn pristine_then_corrupted() {
        let (dir, path) = setup();
        assert!(verify_fixtures(&path).unwrap().iter().all(|(_, s)| *s == FixtureStatus::Ok));
        std::fs::write(dir.path().join("b.txt"), "betA").unwrap();
        std::fs::remove_file(dir.path().join("a.txt")).unwrap();
        let r = verify_fixtures(&path).unwrap();
        assert_eq!(r[0], ("a".to_string(), FixtureStatus::Missing));
        assert!(matches!(r[1].1, FixtureStatus::Mismatch { .. }));
    }

    #[test]
    fn empty_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.toml");
        std::fs::write(&path, "").unwrap();
        assert!(verify_fixtures(&path).unwrap().is_empty());
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}

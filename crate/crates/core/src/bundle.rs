//! Subject manifests and the description/code/unit-test input bundle.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("description required")]
    DescriptionRequired,
    #[error("unit test required")]
    UnitTestRequired,
    #[error("at least one code file required")]
    CodeRequired,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: not valid UTF-8")]
    Encoding { path: PathBuf },
    #[error("{path}: invalid manifest: {msg}")]
    Manifest { path: PathBuf, msg: String },
}

/// On-disk subject manifest. Paths are relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubjectManifest {
    pub subject_id: String,
    #[serde(default)]
    pub description_path: Option<String>,
    #[serde(default)]
    pub code_paths: Vec<String>,
    #[serde(default)]
    pub unit_test_paths: Vec<String>,
    #[serde(default)]
    pub state_schema: Vec<String>,
    #[serde(default)]
    pub safe_command: Option<String>,
    #[serde(default)]
    pub partition_file: Option<String>,
}

impl SubjectManifest {
    pub fn load(path: &Path) -> Result<Self, BundleError> {
        let text = read_text(path)?;
        toml::from_str(&text).map_err(|e| BundleError::Manifest { path: path.to_path_buf(), msg: e.message().to_string() })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub path: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputBundle {
    pub subject_id: String,
    pub description: String,
    pub code_files: Vec<SourceFile>,
    pub unit_test_files: Vec<SourceFile>,
}

fn read_text(path: &Path) -> Result<String, BundleError> {
    let bytes = fs::read(path).map_err(|source| BundleError::Io { path: path.to_path_buf(), source })?;
    String::from_utf8(bytes).map_err(|_| BundleError::Encoding { path: path.to_path_buf() })
}

pub fn load_bundle(manifest_path: &Path) -> Result<InputBundle, BundleError> {
    let manifest = SubjectManifest::load(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let desc_path = manifest.description_path.as_deref().filter(|p| !p.trim().is_empty());
    let Some(desc_path) = desc_path else {
        return Err(BundleError::DescriptionRequired);
    };
    if manifest.unit_test_paths.is_empty() {
        return Err(BundleError::UnitTestRequired);
    }
    if manifest.code_paths.is_empty() {
        return Err(BundleError::CodeRequired);
    }
    let description = read_text(&base.join(desc_path))?;
    if description.trim().is_empty() {
        return Err(BundleError::DescriptionRequired);
    }
    let load = |paths: &[String]| -> Result<Vec<SourceFile>, BundleError> {
        paths.iter().map(|p| Ok(SourceFile { path: p.clone(), text: read_text(&base.join(p))? })).collect()
    };
    Ok(InputBundle {
        subject_id: manifest.subject_id,
        description,
        code_files: load(&manifest.code_paths)?,
        unit_test_files: load(&manifest.unit_test_paths)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) {
        let p = dir.join(name);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, text).unwrap();
    }

    fn fixture(manifest: &str) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "manifest.toml", manifest);
        write(dir.path(), "description.md", "A room.\r\n");
        write(dir.path(), "src/a.py", "x = 1\n");
        write(dir.path(), "src/b.py", "y = 2\n");
        write(dir.path(), "tests/test_a.py", "def test_a():\n    assert x == 1\n");
        dir
    }

    const FULL: &str = r#"
subject_id = "demo"
description_path = "description.md"
code_paths = ["src/b.py", "src/a.py"]
unit_test_paths = ["tests/test_a.py"]
"#;

    #[test]
    fn loads_in_manifest_order_verbatim() {
        let dir = fixture(FULL);
        let b = load_bundle(&dir.path().join("manifest.toml")).unwrap();
        assert_eq!(b.description, "A room.\r\n");
        let paths: Vec<_> = b.code_files.iter().map(|f| f.path.as_str()).collect();
        assert_eq!(paths, ["src/b.py", "src/a.py"]);
        assert_eq!(b, load_bundle(&dir.path().join("manifest.toml")).unwrap());
    }

    #[test]
    fn validation_errors() {
        let no_tests = FULL.replace(r#"unit_test_paths = ["tests/test_a.py"]"#, "");
        let dir = fixture(&no_tests);
        let err = load_bundle(&dir.path().join("manifest.toml")).unwrap_err();
        assert_eq!(err.to_string(), "unit test required");

        let no_desc = FULL.replace(r#"description_path = "description.md""#, "");
        let dir = fixture(&no_desc);
        assert_eq!(load_bundle(&dir.path().join("manifest.toml")).unwrap_err().to_string(), "description required");

        let missing = FULL.replace("src/a.py", "src/gone.py");
        let dir = fixture(&missing);
        match load_bundle(&dir.path().join("manifest.toml")).unwrap_err() {
            BundleError::Io { path, .. } => assert!(path.ends_with("src/gone.py")),
            other => panic!("unexpected {other}"),
        }
    }
}

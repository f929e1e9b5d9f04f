use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(FileDigest {
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
        })
    }
}

/// Record of one command invocation, sufficient to repeat it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    /// Hash of `command`, `config` and `inputs`; outputs carry it.
    pub digest: String,
    /// Timing and other run-dependent notes; not part of `digest`.
    #[serde(default)]
    pub notes: Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(command: &str, config: Value, seeds: Vec<u64>, inputs: Vec<FileDigest>) -> Self {
        let digest = run_digest(command, &config, &inputs);
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            seeds,
            inputs,
            outputs: Vec::new(),
            digest,
            notes: Value::Null,
        }
    }

    pub fn add_output(&mut self, path: &Path) -> Result<()> {
        self.outputs.push(FileDigest::of(path)?);
        Ok(())
    }

    pub fn write_next_to(&self, output: &Path) -> Result<PathBuf> {
        let path = manifest_path(output);
        fs::write(&path, serde_json::to_string_pretty(self)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Confirms that every recorded input still has its recorded content.
    pub fn check_inputs(&self) -> Result<()> {
        for input in &self.inputs {
            let now = FileDigest::of(&input.path)?;
            anyhow::ensure!(
                now.sha256 == input.sha256,
                "input {} changed since the manifest was written",
                input.path.display()
            );
        }
        Ok(())
    }
}

fn run_digest(command: &str, config: &Value, inputs: &[FileDigest]) -> String {
    let canonical = serde_json::json!({ "command": command, "config": config, "inputs": inputs });
    sha256_hex(canonical.to_string().as_bytes())
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

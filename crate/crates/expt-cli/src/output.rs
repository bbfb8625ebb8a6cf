use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Files written by one command, in write order.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<OutputFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl OutputSet {
    pub fn create(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir, files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        if name == MANIFEST_FILE || name.contains(['/', '\\']) {
            return Err(CliError::Manifest(format!("invalid output name '{name}'")));
        }
        let bytes = contents.as_ref();
        std::fs::write(self.dir.join(name), bytes)?;
        self.files.retain(|f| f.name != name);
        self.files.push(OutputFile { name: name.to_string(), bytes: bytes.len(), sha256: digest(bytes) });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// The validated configuration, re-serialized.
    pub config: String,
    pub seed: Option<u64>,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new(command: &str, config: String, seed: Option<u64>, started: Instant, outputs: &OutputSet) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            seed,
            wall_clock_seconds: started.elapsed().as_secs_f64(),
            outputs: outputs.files.clone(),
        }
    }

    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(std::fs::write(dir.as_ref().join(MANIFEST_FILE), text)?)
    }

    pub fn read(dir: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(dir.as_ref().join(MANIFEST_FILE))?)?)
    }

    /// Re-hashes every listed file.
    pub fn verify(&self, dir: impl AsRef<Path>) -> Result<()> {
        for f in &self.outputs {
            let bytes = std::fs::read(dir.as_ref().join(&f.name))?;
            if bytes.len() != f.bytes || digest(&bytes) != f.sha256 {
                return Err(CliError::Manifest(format!("checksum mismatch for {}", f.name)));
            }
        }
        Ok(())
    }
}

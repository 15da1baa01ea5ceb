//! Output directory with checksummed files and the run manifest.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct OutDir {
    root: PathBuf,
    checksums: BTreeMap<String, String>,
}

impl OutDir {
    pub fn create(root: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&root)?;
        Ok(OutDir {
            root,
            checksums: BTreeMap::new(),
        })
    }

    /// Writes a deterministic output and records its checksum.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        std::fs::write(self.root.join(name), bytes)?;
        self.checksums.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::new(crate::error::Kind::Io, e.to_string()))?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    /// Writes a file that is not part of the checksummed outputs.
    pub fn write_untracked(&self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        std::fs::write(self.root.join(name), bytes)?;
        Ok(())
    }

    pub fn finish(mut self, manifest: Manifest) -> Result<(), CliError> {
        let manifest = ManifestFile {
            manifest,
            outputs: std::mem::take(&mut self.checksums),
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        bytes.push(b'\n');
        std::fs::write(self.root.join("manifest.json"), bytes)?;
        Ok(())
    }
}

#[derive(Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub command: String,
    pub seed: u64,
    pub format: crate::config::Format,
    pub config_sha256: String,
}

#[derive(Serialize)]
struct ManifestFile {
    #[serde(flatten)]
    manifest: Manifest,
    outputs: BTreeMap<String, String>,
}

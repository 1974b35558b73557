//! Run manifests: what was run, with which configuration and seed, and the
//! SHA-256 of every input and output file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::raster_files::{read_file, write_file};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub subcommand: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    /// Path as given on the command line -> hex digest.
    pub inputs: BTreeMap<String, String>,
    /// Path relative to the output directory -> hex digest.
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&read_file(path)?))
}

/// Forward slashes regardless of platform, so manifests compare equal
/// across systems.
fn key_for(rel: &Path) -> String {
    rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

impl Manifest {
    pub fn new(subcommand: &str, config: serde_json::Value, seed: Option<u64>) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            config,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    /// Records `root/rel`.
    pub fn add_output(&mut self, root: &Path, rel: &Path) -> Result<()> {
        self.outputs.insert(key_for(rel), sha256_file(&root.join(rel))?);
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }

    /// Outputs under `root` whose content no longer matches, or that are
    /// missing.
    pub fn verify(&self, root: &Path) -> Vec<String> {
        self.outputs
            .iter()
            .filter(|(rel, digest)| sha256_file(&root.join(rel.as_str())).map_or(true, |d| &d != *digest))
            .map(|(rel, _)| rel.clone())
            .collect()
    }
}

pub fn write_manifest(path: &Path, m: &Manifest) -> Result<()> {
    let mut text = m.to_json();
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let bytes = read_file(path)?;
    Manifest::from_json(&String::from_utf8_lossy(&bytes))
}

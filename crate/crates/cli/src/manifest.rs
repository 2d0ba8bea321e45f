//! Provenance record written next to every output.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::output::write_json;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Fingerprint {
    pub path: String,
    /// First 64 bits of the SHA-256 of the file contents, hex encoded.
    pub content_hash: String,
    pub bytes: u64,
}

pub fn fingerprint(path: &Path) -> CliResult<Fingerprint> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let digest = Sha256::digest(&bytes);
    let content_hash = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    Ok(Fingerprint {
        path: path.display().to_string(),
        content_hash,
        bytes: bytes.len() as u64,
    })
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a, O: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    pub options: &'a O,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub toolkit_version: &'static str,
    pub inputs: Vec<Fingerprint>,
    pub outputs: Vec<String>,
    pub started_unix: f64,
    pub finished_unix: f64,
    /// Wall-clock measurements; like the timestamps, not reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<serde_json::Value>,
}

impl<'a, O: Serialize> RunManifest<'a, O> {
    pub fn new(
        command: &'static str,
        options: &'a O,
        threads: Option<usize>,
        seed: Option<u64>,
        started_unix: f64,
    ) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            command,
            options,
            threads,
            seed,
            toolkit_version: env!("CARGO_PKG_VERSION"),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_unix,
            finished_unix: 0.0,
            timing: None,
        }
    }

    pub fn write(mut self, path: &Path) -> CliResult<()> {
        self.finished_unix = unix_now();
        write_json(path, &self)
    }
}

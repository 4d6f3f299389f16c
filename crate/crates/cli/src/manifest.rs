use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Provenance block embedded in every JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    /// Input name to SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.into(),
            arguments: std::env::args().skip(1).collect(),
            seed: None,
            version: env!("CARGO_PKG_VERSION").into(),
            inputs: BTreeMap::new(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }

    pub fn record_input(&mut self, name: &str, bytes: &[u8]) {
        self.inputs
            .insert(name.into(), hex::encode(Sha256::digest(bytes)));
    }
}

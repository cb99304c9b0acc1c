use std::path::PathBuf;

use serde::Serialize;
use sha2::{Digest, Sha256};
use udn_core::{Limits, Mode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Everything that can change a result. The digest of this, together with
/// the command and its arguments, names the run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub enum_cap: u64,
    pub degree_cap: u64,
    pub node_budget: u64,
    /// Climb samples per sampler in estimated mode.
    pub climb_budget: u64,
    pub trials: u64,
    pub mode: Mode,
    /// Recorded only; library calls run sequentially.
    pub workers: usize,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
}

impl RunConfig {
    pub fn limits(&self) -> Limits {
        Limits {
            enum_cap: self.enum_cap,
            degree_cap: self.degree_cap,
            node_budget: self.node_budget,
        }
    }

    /// Hex SHA-256 of the config and the command parameters.
    pub fn digest(&self, command: &str, params: &serde_json::Value) -> String {
        let blob = serde_json::json!({ "config": self, "command": command, "params": params });
        hex::encode(Sha256::digest(blob.to_string().as_bytes()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

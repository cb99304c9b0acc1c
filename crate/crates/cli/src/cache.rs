//! Result cache: one JSON file per key under the cache directory.

use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::config::sha256_hex;

/// Bumped whenever a cached payload changes shape; older entries are ignored.
pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Outcome {
    pub result: serde_json::Value,
    pub certified: bool,
    pub inconclusive: bool,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    schema: u32,
    key: String,
    outcome: Outcome,
}

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    /// Key over the group identity, the operation and everything that
    /// affects its output.
    pub fn key(group: &str, generator_digest: &str, op: &str, params: &serde_json::Value) -> String {
        let blob = serde_json::json!({
            "schema": SCHEMA,
            "group": group,
            "generators": generator_digest,
            "op": op,
            "params": params,
        });
        sha256_hex(blob.to_string().as_bytes())
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn get(&self, key: &str) -> Option<Outcome> {
        let text = fs::read_to_string(self.path(key)?).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        (entry.schema == SCHEMA && entry.key == key).then_some(entry.outcome)
    }

    /// Best effort: a cache that cannot be written is skipped.
    pub fn put(&self, key: &str, outcome: &Outcome) {
        let Some(path) = self.path(key) else { return };
        if let Some(dir) = path.parent() {
            if fs::create_dir_all(dir).is_err() {
                return;
            }
        }
        let entry = Entry {
            schema: SCHEMA,
            key: key.to_string(),
            outcome: outcome.clone(),
        };
        if let Ok(text) = serde_json::to_string(&entry) {
            let tmp = path.with_extension("tmp");
            if fs::write(&tmp, text).is_ok() {
                let _ = fs::rename(&tmp, &path);
            }
        }
    }

    /// Returns the cached outcome or computes and stores it.
    pub fn get_or<E>(&self, key: &str, compute: impl FnOnce() -> Result<Outcome, E>) -> Result<Outcome, E> {
        if let Some(hit) = self.get(key) {
            return Ok(hit);
        }
        let outcome = compute()?;
        self.put(key, &outcome);
        Ok(outcome)
    }
}

//! Result cache: one JSON file per key.

use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const CACHE_DIR_VAR: &str = "TENSORIA_CACHE_DIR";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    key: String,
    version: String,
    request: Value,
    value: Value,
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// `$TENSORIA_CACHE_DIR`, else `$HOME/.cache/tensoria`, else none.
    pub fn from_env() -> Option<Cache> {
        let dir = match std::env::var_os(CACHE_DIR_VAR) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => PathBuf::from(std::env::var_os("HOME")?).join(".cache").join("tensoria"),
        };
        Some(Cache { dir })
    }

    #[cfg(test)]
    pub fn at(dir: impl AsRef<std::path::Path>) -> Cache {
        Cache { dir: dir.as_ref().to_path_buf() }
    }

    /// Hex SHA-256 of the canonical request JSON and the tool version.
    pub fn key(request: &Value) -> String {
        let mut h = Sha256::new();
        h.update(TOOL_VERSION.as_bytes());
        h.update([0]);
        h.update(serde_json::to_vec(request).expect("json values serialize"));
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A stored value for exactly this request and tool version.
    pub fn get(&self, request: &Value) -> Option<Value> {
        let key = Cache::key(request);
        let text = fs::read_to_string(self.path(&key)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        (entry.key == key && entry.version == TOOL_VERSION && &entry.request == request).then_some(entry.value)
    }

    /// Best effort: an unwritable cache never fails a command.
    pub fn put(&self, request: &Value, value: &Value) {
        let key = Cache::key(request);
        let entry = CacheEntry { key: key.clone(), version: TOOL_VERSION.into(), request: request.clone(), value: value.clone() };
        if fs::create_dir_all(&self.dir).is_err() {
            return;
        }
        let tmp = self.dir.join(format!("{key}.json.tmp"));
        let ok = serde_json::to_vec_pretty(&entry).ok().map(|bytes| fs::write(&tmp, bytes).is_ok()) == Some(true);
        if ok {
            let _ = fs::rename(&tmp, self.path(&key));
        }
    }
}

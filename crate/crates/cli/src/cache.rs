//! Optional on-disk result cache.
//!
//! When QHODGE_CACHE_DIR names a directory, finished command output is
//! stored there as JSON keyed by the canonical request text. Files are
//! named by a hash of the key but store the key itself, and a read
//! only counts as a hit when the stored key matches, so a hash
//! collision degrades to a miss. Every failure path (unreadable
//! directory, corrupt file, full disk) is silent: the cache can only
//! ever change latency, never results.

use std::fs;
use std::path::PathBuf;

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn from_env() -> Self {
        let dir = std::env::var_os("QHODGE_CACHE_DIR").map(PathBuf::from);
        Cache { dir }
    }

    fn path_for(&self, key: &str) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        Some(dir.join(format!("qh-{:016x}.json", fnv64(key.as_bytes()))))
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let path = self.path_for(key)?;
        let text = fs::read_to_string(path).ok()?;
        let v: serde_json::Value = serde_json::from_str(&text).ok()?;
        if v.get("key")?.as_str()? != key {
            return None;
        }
        Some(v.get("output")?.as_str()?.to_string())
    }

    pub fn put(&self, key: &str, output: &str) {
        let Some(path) = self.path_for(key) else { return };
        if let Some(dir) = &self.dir {
            let _ = fs::create_dir_all(dir);
        }
        let entry = serde_json::json!({ "key": key, "output": output });
        let _ = fs::write(path, entry.to_string());
    }
}

/// FNV-1a, enough to spread file names; correctness never depends on it.
fn fnv64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

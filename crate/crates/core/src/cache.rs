//! On-disk artifact cache.
//!
//! Artifacts are JSON documents stored under content keys; writes go through
//! a temporary file and an atomic rename so readers never observe partial
//! files, and reads bump the file's modification time so garbage collection
//! can evict least-recently-used entries first.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::tate::hex;

pub const CACHE_ENV_VAR: &str = "WEYLITH_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".weylith-cache";

#[derive(Clone, Debug)]
pub struct CacheDir {
    root: PathBuf,
    enabled: bool,
}

impl CacheDir {
    /// Resolve the cache location: an explicit path wins, then the
    /// environment variable, then the default directory.
    pub fn resolve(explicit: Option<PathBuf>, disabled: bool) -> Self {
        let root = explicit
            .or_else(|| std::env::var_os(CACHE_ENV_VAR).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
        CacheDir {
            root,
            enabled: !disabled,
        }
    }

    pub fn at(root: PathBuf) -> Self {
        CacheDir {
            root,
            enabled: true,
        }
    }

    pub fn disabled() -> Self {
        CacheDir {
            root: PathBuf::new(),
            enabled: false,
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn entry_path(&self, key: &str) -> PathBuf {
        self.root.join(format!("{key}.json"))
    }

    /// Fetch a cached document and mark it recently used. Unreadable
    /// entries are treated as misses.
    pub fn load(&self, key: &str) -> Option<String> {
        if !self.enabled {
            return None;
        }
        let path = self.entry_path(key);
        let contents = fs::read_to_string(&path).ok()?;
        if let Ok(f) = fs::File::options().write(true).open(&path) {
            let _ = f.set_modified(SystemTime::now());
        }
        Some(contents)
    }

    /// Store a document under a key, atomically.
    pub fn store(&self, key: &str, contents: &str) -> Result<()> {
        if !self.enabled {
            return Ok(());
        }
        fs::create_dir_all(&self.root)?;
        let tmp = tempfile::Builder::new()
            .prefix(".tmp-")
            .suffix(".part")
            .tempfile_in(&self.root)?;
        fs::write(tmp.path(), contents)?;
        tmp.persist(self.entry_path(key))
            .map_err(|e| e.error)?;
        Ok(())
    }

    /// Evict least-recently-used entries until the cache fits the byte
    /// budget. In-progress temporary files are left alone.
    pub fn gc(&self, max_bytes: u64) -> Result<GcReport> {
        let mut entries: Vec<(PathBuf, u64, SystemTime)> = Vec::new();
        let dir = match fs::read_dir(&self.root) {
            Ok(d) => d,
            Err(_) => {
                return Ok(GcReport {
                    kept: 0,
                    removed: 0,
                    kept_bytes: 0,
                    freed_bytes: 0,
                })
            }
        };
        for entry in dir {
            let entry = entry?;
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let meta = entry.metadata()?;
            if !meta.is_file() {
                continue;
            }
            let mtime = meta.modified().unwrap_or(SystemTime::UNIX_EPOCH);
            entries.push((path, meta.len(), mtime));
        }
        // Oldest first; ties broken by path for determinism.
        entries.sort_by(|a, b| a.2.cmp(&b.2).then_with(|| a.0.cmp(&b.0)));
        let mut total: u64 = entries.iter().map(|e| e.1).sum();
        let mut report = GcReport {
            kept: entries.len(),
            removed: 0,
            kept_bytes: total,
            freed_bytes: 0,
        };
        for (path, size, _) in entries {
            if total <= max_bytes {
                break;
            }
            fs::remove_file(&path)?;
            total -= size;
            report.removed += 1;
            report.kept -= 1;
            report.freed_bytes += size;
            report.kept_bytes -= size;
        }
        Ok(report)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GcReport {
    pub kept: usize,
    pub removed: usize,
    pub kept_bytes: u64,
    pub freed_bytes: u64,
}

/// Stable content key from the parts that determine an artifact.
pub fn cache_key(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex(&h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_cache() -> (tempfile::TempDir, CacheDir) {
        let dir = tempfile::tempdir().unwrap();
        let cache = CacheDir::at(dir.path().to_path_buf());
        (dir, cache)
    }

    #[test]
    fn store_then_load_round_trips() {
        let (_guard, cache) = temp_cache();
        let key = cache_key(&["a", "b"]);
        assert!(cache.load(&key).is_none());
        cache.store(&key, "{\"x\":1}").unwrap();
        assert_eq!(cache.load(&key).unwrap(), "{\"x\":1}");
    }

    #[test]
    fn keys_separate_their_parts() {
        assert_ne!(cache_key(&["ab", "c"]), cache_key(&["a", "bc"]));
        assert_eq!(cache_key(&["x"]), cache_key(&["x"]));
    }

    #[test]
    fn gc_evicts_oldest_entries_first() {
        let (_guard, cache) = temp_cache();
        for (i, k) in ["k1", "k2", "k3"].iter().enumerate() {
            cache.store(k, &"x".repeat(100)).unwrap();
            // Distinct mtimes, oldest first.
            let path = cache.root().join(format!("{k}.json"));
            let t = SystemTime::UNIX_EPOCH + std::time::Duration::from_secs(1000 + i as u64);
            fs::File::options()
                .write(true)
                .open(path)
                .unwrap()
                .set_modified(t)
                .unwrap();
        }
        let report = cache.gc(250).unwrap();
        assert_eq!(report.removed, 1);
        assert_eq!(report.kept, 2);
        assert!(cache.load("k1").is_none());
        assert!(cache.load("k2").is_some());
        assert!(cache.load("k3").is_some());
    }

    #[test]
    fn load_refreshes_recency() {
        let (_guard, cache) = temp_cache();
        cache.store("old", "aaaa").unwrap();
        cache.store("new", "bbbb").unwrap();
        for (k, secs) in [("old", 100u64), ("new", 200)] {
            let path = cache.root().join(format!("{k}.json"));
            fs::File::options()
                .write(true)
                .open(path)
                .unwrap()
                .set_modified(SystemTime::UNIX_EPOCH + std::time::Duration::from_secs(secs))
                .unwrap();
        }
        // Touch the old entry; it should now survive a gc that removes one.
        cache.load("old").unwrap();
        let report = cache.gc(4).unwrap();
        assert_eq!(report.removed, 1);
        assert!(cache.load("old").is_some());
        assert!(cache.load("new").is_none());
    }

    #[test]
    fn disabled_cache_is_inert() {
        let cache = CacheDir::disabled();
        cache.store("k", "v").unwrap();
        assert!(cache.load("k").is_none());
    }

    #[test]
    fn temporary_files_are_not_collected() {
        let (_guard, cache) = temp_cache();
        cache.store("k", "data").unwrap();
        fs::write(cache.root().join(".tmp-x.part"), "partial").unwrap();
        let report = cache.gc(0).unwrap();
        assert_eq!(report.removed, 1);
        assert!(cache.root().join(".tmp-x.part").exists());
    }
}

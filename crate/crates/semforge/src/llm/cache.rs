//! Filesystem response cache.
//!
//! Layout: `<root>/<first two hash hex chars>/<hash>.json`, one JSON entry
//! per content hash carrying the full request metadata for auditability.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// One cached exchange.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub hash: String,
    pub model: String,
    pub endpoint: String,
    pub temperature: u32,
    pub snippet_id: u64,
    pub prompt: String,
    pub response: String,
}

/// Content-addressed response store.
#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entry_path(&self, hash: &str) -> PathBuf {
        let shard = hash.get(..2).unwrap_or("xx");
        self.root.join(shard).join(format!("{hash}.json"))
    }

    pub fn load(&self, hash: &str) -> io::Result<Option<CacheEntry>> {
        let path = self.entry_path(hash);
        match fs::read_to_string(&path) {
            Ok(text) => {
                let entry: CacheEntry = serde_json::from_str(&text).map_err(|e| {
                    io::Error::new(
                        io::ErrorKind::InvalidData,
                        format!("corrupt cache entry {}: {e}", path.display()),
                    )
                })?;
                Ok(Some(entry))
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn store(&self, entry: &CacheEntry) -> io::Result<()> {
        let path = self.entry_path(&entry.hash);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let json = serde_json::to_string_pretty(entry).expect("entry serializes");
        fs::write(path, json)
    }

    /// Number of stored entries; walks the two-level layout.
    pub fn entry_count(&self) -> io::Result<usize> {
        let mut count = 0;
        let dirs = match fs::read_dir(&self.root) {
            Ok(dirs) => dirs,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e),
        };
        for dir in dirs {
            let dir = dir?;
            if dir.file_type()?.is_dir() {
                for file in fs::read_dir(dir.path())? {
                    let file = file?;
                    if file.path().extension().is_some_and(|e| e == "json") {
                        count += 1;
                    }
                }
            }
        }
        Ok(count)
    }
}

use crate::{LmfdbError, LmfdbRecord, Query};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const CACHE_FORMAT: &str = "pgeo-lmfdb-cache";
pub const CACHE_VERSION: u32 = 1;

/// Answer to one query. An empty `fields` list records a negative lookup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub fetched_at: DateTime<Utc>,
    pub fields: Vec<LmfdbRecord>,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format: String,
    version: u32,
    entries: BTreeMap<String, CacheEntry>,
}

/// Query-keyed store backed by one JSON file. Saves go through a temporary file
/// in the same directory and a rename, so readers never see a partial file.
#[derive(Debug, Default)]
pub struct FactCache {
    path: Option<PathBuf>,
    entries: BTreeMap<String, CacheEntry>,
}

impl FactCache {
    pub fn in_memory() -> Self {
        FactCache::default()
    }

    /// Loads `path`, or starts empty if it does not exist yet.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, LmfdbError> {
        let path = path.into();
        let err = |reason: String| LmfdbError::Cache { path: path.display().to_string(), reason };
        let entries = match std::fs::read_to_string(&path) {
            Ok(text) => {
                let file: CacheFile = serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
                if file.format != CACHE_FORMAT || file.version != CACHE_VERSION {
                    return Err(err(format!("format {} v{} not understood", file.format, file.version)));
                }
                for entry in file.entries.values() {
                    for rec in &entry.fields {
                        rec.validate()?;
                    }
                }
                file.entries
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(err(e.to_string())),
        };
        Ok(FactCache { path: Some(path), entries })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, q: &Query) -> Option<&CacheEntry> {
        self.entries.get(&q.key())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &LmfdbRecord> {
        self.entries.values().flat_map(|e| e.fields.iter())
    }

    /// Inserts and writes through to disk.
    pub fn insert(&mut self, q: &Query, entry: CacheEntry) -> Result<(), LmfdbError> {
        self.entries.insert(q.key(), entry);
        self.save()
    }

    pub fn save(&self) -> Result<(), LmfdbError> {
        let Some(path) = &self.path else { return Ok(()) };
        let err = |reason: String| LmfdbError::Cache { path: path.display().to_string(), reason };
        let file = CacheFile { format: CACHE_FORMAT.into(), version: CACHE_VERSION, entries: self.entries.clone() };
        let mut text = serde_json::to_string_pretty(&file).map_err(|e| err(e.to_string()))?;
        text.push('\n');
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| err(e.to_string()))?;
        tmp.write_all(text.as_bytes()).map_err(|e| err(e.to_string()))?;
        tmp.as_file().sync_all().map_err(|e| err(e.to_string()))?;
        tmp.persist(path).map_err(|e| err(e.to_string()))?;
        Ok(())
    }
}

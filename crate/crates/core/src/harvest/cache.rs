//! Append-only JSON-lines store of per-unit order data and certified field invariants.
//!
//! Line 1 is a header binding the file to (degree, signature, S, caps). Every further
//! line is one record, either
//!   {"kind":"unit","poly":[c_0,..,c_{d-1}],"unit":{"key":..,"status":..,"orders":[..]}}
//! or
//!   {"kind":"field","key":{"disc":..,"poly":[..]},"signature":[r,s],"h":..,"regulator":..,..}
//! with integers written as decimal strings. Later records for the same key win. A
//! torn final line from an interrupted run is dropped on open.

use super::{Caps, FieldKey, FieldRecord, HarvestError, OrderTerm, SweepConfig, UnitStatus};
use crate::exactpoly::MonicIntPolynomial;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

pub const CACHE_FORMAT: &str = "pgeo-harvest";
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub format: String,
    pub version: u32,
    pub degree: usize,
    pub signature: (usize, usize),
    pub primes: Vec<u64>,
    pub caps: Caps,
}

impl CacheHeader {
    pub fn for_config(cfg: &SweepConfig) -> Self {
        CacheHeader {
            format: CACHE_FORMAT.into(),
            version: CACHE_VERSION,
            degree: cfg.degree,
            signature: cfg.signature,
            primes: cfg.primes.iter().copied().collect(),
            caps: cfg.caps.clone(),
        }
    }
}

/// What the harvest derives from a unit's polynomial alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedUnit {
    pub key: Option<FieldKey>,
    pub status: UnitStatus,
    pub orders: Vec<OrderTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line {
    Unit { poly: MonicIntPolynomial, unit: CachedUnit },
    Field(FieldRecord),
}

pub struct HarvestCache {
    path: PathBuf,
    header: CacheHeader,
    units: HashMap<MonicIntPolynomial, CachedUnit>,
    fields: BTreeMap<FieldKey, FieldRecord>,
    writer: Option<BufWriter<File>>,
}

fn cache_err(path: &Path, m: impl std::fmt::Display) -> HarvestError {
    HarvestError::Cache(format!("{}: {m}", path.display()))
}

impl HarvestCache {
    /// Opens or creates the cache for writing. Only one writer may hold a file; a second
    /// `open` fails while the first is alive.
    pub fn open(path: impl AsRef<Path>, cfg: &SweepConfig) -> Result<Self, HarvestError> {
        let path = path.as_ref();
        let mut file = OpenOptions::new().read(true).write(true).create(true).truncate(false).open(path)?;
        file.try_lock().map_err(|_| cache_err(path, "locked by another writer"))?;
        let mut text = String::new();
        file.read_to_string(&mut text)?;
        let want = CacheHeader::for_config(cfg);
        let mut cache = if text.is_empty() {
            serde_json::to_writer(&mut file, &want).map_err(|e| cache_err(path, e))?;
            file.write_all(b"\n")?;
            HarvestCache { path: path.to_path_buf(), header: want, units: HashMap::new(), fields: BTreeMap::new(), writer: None }
        } else {
            let (cache, good) = Self::parse(path, &text)?;
            if cache.header != want {
                return Err(cache_err(path, format!("header {:?} does not match the run {:?}", cache.header, want)));
            }
            if good < text.len() {
                log::warn!("{}: dropping a torn final record", path.display());
                file.set_len(good as u64)?;
            }
            cache
        };
        file.seek(SeekFrom::End(0))?;
        cache.writer = Some(BufWriter::new(file));
        Ok(cache)
    }

    /// Reads a cache without taking the writer lock.
    pub fn read(path: impl AsRef<Path>) -> Result<Self, HarvestError> {
        let path = path.as_ref();
        let mut text = String::new();
        File::open(path)?.read_to_string(&mut text)?;
        Ok(Self::parse(path, &text)?.0)
    }

    /// Header and records, plus the byte length of the well-formed prefix.
    fn parse(path: &Path, text: &str) -> Result<(Self, usize), HarvestError> {
        let mut lines = text.as_bytes().split_inclusive(|&b| b == b'\n').peekable();
        let first = lines.next().ok_or_else(|| cache_err(path, "empty file"))?;
        let header: CacheHeader = serde_json::from_slice(first).map_err(|e| cache_err(path, format!("bad header: {e}")))?;
        if header.format != CACHE_FORMAT || header.version != CACHE_VERSION {
            return Err(cache_err(path, format!("unsupported format {} v{}", header.format, header.version)));
        }
        let mut cache = HarvestCache { path: path.to_path_buf(), header, units: HashMap::new(), fields: BTreeMap::new(), writer: None };
        let mut offset = first.len();
        let mut n = 1;
        while let Some(line) = lines.next() {
            n += 1;
            let last = lines.peek().is_none();
            match serde_json::from_slice::<Line>(line) {
                Ok(Line::Unit { poly, unit }) => {
                    cache.units.insert(poly, unit);
                }
                Ok(Line::Field(rec)) => {
                    cache.fields.insert(rec.key.clone(), rec);
                }
                Err(_) if last && !line.ends_with(b"\n") => break,
                Err(e) => return Err(cache_err(path, format!("line {n}: {e}"))),
            }
            offset += line.len();
        }
        Ok((cache, offset))
    }

    pub fn header(&self) -> &CacheHeader {
        &self.header
    }

    pub fn unit(&self, poly: &MonicIntPolynomial) -> Option<&CachedUnit> {
        self.units.get(poly)
    }

    pub fn field(&self, key: &FieldKey) -> Option<&FieldRecord> {
        self.fields.get(key)
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    pub fn field_count(&self) -> usize {
        self.fields.len()
    }

    fn append(&mut self, line: &Line) -> Result<(), HarvestError> {
        let path = self.path.clone();
        let w = self.writer.as_mut().ok_or_else(|| cache_err(&path, "opened read-only"))?;
        serde_json::to_writer(&mut *w, line).map_err(|e| cache_err(&path, e))?;
        w.write_all(b"\n")?;
        Ok(())
    }

    pub fn put_unit(&mut self, poly: &MonicIntPolynomial, unit: &CachedUnit) -> Result<(), HarvestError> {
        self.append(&Line::Unit { poly: poly.clone(), unit: unit.clone() })?;
        self.units.insert(poly.clone(), unit.clone());
        Ok(())
    }

    pub fn put_field(&mut self, rec: &FieldRecord) -> Result<(), HarvestError> {
        self.append(&Line::Field(rec.clone()))?;
        self.fields.insert(rec.key.clone(), rec.clone());
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), HarvestError> {
        if let Some(w) = self.writer.as_mut() {
            w.flush()?;
        }
        Ok(())
    }
}

impl Drop for HarvestCache {
    fn drop(&mut self) {
        let _ = self.flush();
    }
}

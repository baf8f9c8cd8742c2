//! Class numbers and regulators of cubic fields from the LMFDB number-field API.
//!
//! Every lookup goes through a single-file JSON cache. With the cache frozen (the
//! fixture under `data/`) and the client offline, results are fully reproducible.

mod cache;
mod client;
mod crosscheck;

pub use cache::{CacheEntry, FactCache, CACHE_FORMAT, CACHE_VERSION};
pub use client::{offline_requested, Client, ClientConfig, DEFAULT_BASE_URL, MIN_INTERVAL, OFFLINE_ENV};
pub use crosscheck::{CrosscheckReport, LocalInvariants, RowOutcome, RowStatus, R_TOLERANCE};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum LmfdbError {
    #[error("no field matches {0}")]
    NotFound(Query),
    #[error("{query}: network unavailable and not cached ({reason})")]
    NetworkUnavailable { query: Query, reason: String },
    #[error("unexpected payload: {0}")]
    SchemaMismatch(String),
    #[error("{query} matches several fields: {}", labels.join(", "))]
    Ambiguous { query: Query, labels: Vec<String> },
    #[error("HTTP {status} from {url}")]
    Http { status: u16, url: String },
    #[error("cache {path}: {reason}")]
    Cache { path: String, reason: String },
}

impl LmfdbError {
    /// Errors caused by the environment (network, filesystem) rather than by the data.
    pub fn is_environmental(&self) -> bool {
        matches!(self, LmfdbError::NetworkUnavailable { .. } | LmfdbError::Http { .. } | LmfdbError::Cache { .. })
    }
}

/// What to look up. Polynomials are given low degree first, leading 1 included.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Query {
    Discriminant(i64),
    Polynomial(Vec<i64>),
}

impl Query {
    /// Cache key; also the query-string fragment sent upstream.
    pub fn key(&self) -> String {
        match self {
            Query::Discriminant(d) => format!("disc={d}"),
            Query::Polynomial(c) => {
                format!("coeffs={}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// One `nf_fields` row, restricted to the columns we request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LmfdbRecord {
    pub label: String,
    pub degree: u32,
    pub disc_abs: u64,
    pub disc_sign: i8,
    pub r1: u32,
    pub r2: u32,
    pub class_number: u64,
    pub regulator: f64,
    pub coeffs: Vec<i64>,
}

/// Columns requested from the API, in the order above.
pub const FIELDS: &[&str] = &["label", "degree", "disc_abs", "disc_sign", "r1", "r2", "class_number", "regulator", "coeffs"];

impl LmfdbRecord {
    pub fn discriminant(&self) -> i64 {
        self.disc_abs as i64 * self.disc_sign as i64
    }

    pub(crate) fn validate(&self) -> Result<(), LmfdbError> {
        let bad = |m: String| Err(LmfdbError::SchemaMismatch(format!("{}: {m}", self.label)));
        if self.degree != 3 {
            return bad(format!("degree {}", self.degree));
        }
        if self.coeffs.len() != 4 || self.coeffs[3] != 1 {
            return bad(format!("coefficients {:?} are not a monic cubic", self.coeffs));
        }
        if self.disc_abs == 0 || self.disc_sign.abs() != 1 {
            return bad(format!("discriminant {}·{}", self.disc_sign, self.disc_abs));
        }
        if self.r1 + 2 * self.r2 != 3 {
            return bad(format!("signature ({}, {})", self.r1, self.r2));
        }
        if self.class_number == 0 || !(self.regulator > 0.0 && self.regulator.is_finite()) {
            return bad(format!("h = {}, R = {}", self.class_number, self.regulator));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Remote,
    Cache,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldFact {
    pub label: String,
    pub discriminant: i64,
    pub h: u64,
    #[serde(rename = "R")]
    pub regulator: f64,
    pub signature: (u32, u32),
    pub coeffs: Vec<i64>,
    pub source: Source,
    pub fetched_at: DateTime<Utc>,
}

impl FieldFact {
    pub(crate) fn from_record(rec: &LmfdbRecord, source: Source, fetched_at: DateTime<Utc>) -> Self {
        FieldFact {
            label: rec.label.clone(),
            discriminant: rec.discriminant(),
            h: rec.class_number,
            regulator: rec.regulator,
            signature: (rec.r1, rec.r2),
            coeffs: rec.coeffs.clone(),
            source,
            fetched_at,
        }
    }

    /// Same fact with provenance stripped, for comparing a cached copy to a fresh one.
    pub fn invariant_part(&self) -> (&str, i64, u64, u64, (u32, u32), &[i64]) {
        (&self.label, self.discriminant, self.h, self.regulator.to_bits(), self.signature, &self.coeffs)
    }
}

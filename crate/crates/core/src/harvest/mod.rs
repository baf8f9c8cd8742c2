//! The enumeration driver: coefficient boxes, the unit sweep, field and order data,
//! and the weighted count theta_S with its ratio table.

mod bounds;
mod cache;
mod enumerate;
mod fields;
mod oracle;
mod theta;

pub use bounds::{coefficient_bounds, log_modulus_bounds};
pub use cache::{CacheHeader, CachedUnit, HarvestCache, CACHE_FORMAT, CACHE_VERSION};
pub use enumerate::{enumerate_units, UnitRecord, UnitStream};
pub use fields::{field_key, FieldKey, FieldRecord};
pub use oracle::units_in_box;
pub use theta::{harvest, sweep_ratios, theta_s, Harvest, OrderTerm, SweepRow, ThetaAccumulator, ThetaTerm, UnitEntry, UnitStatus};

use crate::chamber::{BoxConvention, BoxSpec};
use crate::exec::Executor;
use crate::orderfield::{DEFAULT_CONDUCTOR_CAP, DEFAULT_INDEX_CAP};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, thiserror::Error)]
pub enum HarvestError {
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Limits past which a field or order is skipped and recorded instead of computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest [O_F : Z[lambda]] whose intermediate orders are enumerated.
    pub index: u64,
    /// Largest conductor norm accepted.
    pub conductor: u64,
    /// Largest |disc F| sent to unit and class group certification.
    pub discriminant: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { index: DEFAULT_INDEX_CAP, conductor: DEFAULT_CONDUCTOR_CAP, discriminant: 1_000_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub degree: usize,
    pub signature: (usize, usize),
    pub primes: BTreeSet<u64>,
    #[serde(rename = "box")]
    pub box_spec: BoxSpec,
    pub precision_bits: u32,
    #[serde(default)]
    pub caps: Caps,
    pub shards: usize,
    #[serde(skip)]
    pub executor: Executor,
}

impl SweepConfig {
    /// Defaults for everything but the field family and the box.
    pub fn new(signature: (usize, usize), primes: &[u64], box_spec: BoxSpec) -> Self {
        SweepConfig {
            degree: signature.0 + 2 * signature.1,
            signature,
            primes: primes.iter().copied().collect(),
            box_spec,
            precision_bits: 128,
            caps: Caps::default(),
            shards: 8,
            executor: Executor::default(),
        }
    }

    pub fn with_box(&self, box_spec: BoxSpec) -> Self {
        SweepConfig { box_spec, ..self.clone() }
    }

    pub fn rank(&self) -> usize {
        self.signature.0 + self.signature.1 - 1
    }

    pub fn validate(&self) -> Result<(), HarvestError> {
        let bad = |m: String| Err(HarvestError::InvalidConfig(m));
        let (r, s) = self.signature;
        if self.degree < 3 || !crate::arith::primes::is_prime(self.degree as u64) {
            return bad(format!("degree {} is not a prime >= 3", self.degree));
        }
        if r + 2 * s != self.degree {
            return bad(format!("signature ({r},{s}) does not give degree {}", self.degree));
        }
        if self.primes.len() < 2 {
            return bad(format!("S needs at least two primes, got {:?}", self.primes));
        }
        if let Some(q) = self.primes.iter().find(|&&q| !crate::arith::primes::is_prime(q)) {
            return bad(format!("{q} in S is not prime"));
        }
        if self.box_spec.dim() != self.rank() {
            return bad(format!("box has {} thresholds, the unit rank is {}", self.box_spec.dim(), self.rank()));
        }
        if let Some(t) = self.box_spec.thresholds.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return bad(format!("threshold {t} is not positive"));
        }
        if self.box_spec.convention == BoxConvention::Multiplicative && self.box_spec.thresholds.iter().any(|&t| t <= 1.0) {
            log::info!("multiplicative thresholds <= 1 leave an empty box");
        }
        if self.precision_bits < 64 {
            return bad(format!("precision {} below 64 bits", self.precision_bits));
        }
        if self.shards == 0 {
            return bad("shard count must be positive".into());
        }
        Ok(())
    }
}

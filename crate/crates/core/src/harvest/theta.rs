//! Units grouped into fields and orders, and the weighted count theta_S.

use super::cache::{CachedUnit, HarvestCache};
use super::{enumerate_units, field_key, FieldKey, FieldRecord, HarvestError, SweepConfig, UnitRecord};
use crate::chamber::{constant_c, in_box_values, BoxSpec, GeodesicRecord};
use crate::orderfield::{maximal_order, orders_between_with, OrderError};
use crate::unitlattice::{FieldInvariants, InvariantConfig};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// One order Z[lambda] in O in O_F, maximal at S, seen from the unit lambda.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderTerm {
    #[serde(with = "crate::arith::serde_int::dec")]
    pub conductor_index: BigInt,
    /// |(O_F/f)^x| / |(O/f)^x|, so hR(O) = hR(O_F) * unit_ratio
    pub unit_ratio: f64,
    pub lambda_s: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitStatus {
    Counted,
    /// this prime of S is decomposed in the field
    OutsideFamily(u64),
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitEntry {
    pub unit: UnitRecord,
    pub key: Option<FieldKey>,
    pub status: UnitStatus,
    pub orders: Vec<OrderTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaTerm {
    pub poly: crate::exactpoly::MonicIntPolynomial,
    pub key: FieldKey,
    #[serde(with = "crate::arith::serde_int::dec")]
    pub conductor_index: BigInt,
    pub multiplicity: u32,
    pub hr: f64,
    pub lambda_s: u64,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ThetaAccumulator {
    pub total: f64,
    /// (unit, order) incidences with a non-zero contribution
    pub contributing_orders: u64,
    pub skipped: BTreeMap<String, u64>,
    pub terms: Option<Vec<ThetaTerm>>,
}

impl ThetaAccumulator {
    pub fn skipped_mass(&self) -> u64 {
        self.skipped.values().sum()
    }

    /// Sums of disjoint pieces; term ledgers are concatenated.
    pub fn merge(mut self, other: ThetaAccumulator) -> Self {
        self.total += other.total;
        self.contributing_orders += other.contributing_orders;
        for (k, v) in other.skipped {
            *self.skipped.entry(k).or_default() += v;
        }
        self.terms = match (self.terms, other.terms) {
            (Some(mut a), Some(b)) => {
                a.extend(b);
                Some(a)
            }
            (a, b) => a.or(b),
        };
        self
    }
}

/// Everything the sweep learned about the units of one box.
#[derive(Debug, Clone)]
pub struct Harvest {
    pub config: SweepConfig,
    pub candidates: u64,
    /// candidates lost before a unit record existed
    pub stream_skipped: BTreeMap<String, u64>,
    /// sorted by polynomial
    pub units: Vec<UnitEntry>,
    pub fields: BTreeMap<FieldKey, FieldRecord>,
}

fn classify(unit: &UnitRecord, cfg: &SweepConfig) -> CachedUnit {
    let skip = |why: &str| CachedUnit { key: None, status: UnitStatus::Skipped(why.to_string()), orders: vec![] };
    let max = maximal_order(&unit.poly);
    if max.field_discriminant.magnitude() > &cfg.caps.discriminant.into() {
        return skip("discriminant cap");
    }
    let key = field_key(&max);
    let entries = match orders_between_with(&max, &cfg.primes, cfg.caps.index) {
        Ok(e) => e,
        Err(OrderError::Decomposed(q)) => return CachedUnit { key: Some(key), status: UnitStatus::OutsideFamily(q), orders: vec![] },
        Err(OrderError::IndexCapExceeded { .. }) => return skip("index cap"),
        Err(e) => return skip(&format!("order: {e}")),
    };
    let mut orders = Vec::with_capacity(entries.len());
    for e in entries {
        if e.conductor.conductor_norm > BigInt::from(cfg.caps.conductor) {
            return skip("conductor cap");
        }
        orders.push(OrderTerm {
            unit_ratio: e.conductor.unit_ratio(),
            conductor_index: e.conductor.conductor_index,
            lambda_s: e.lambda_s,
        });
    }
    CachedUnit { key: Some(key), status: UnitStatus::Counted, orders }
}

fn certify(key: &FieldKey, cfg: &SweepConfig) -> FieldRecord {
    let inv = InvariantConfig { disc_cap: cfg.caps.discriminant.into(), ..InvariantConfig::default() };
    match FieldInvariants::compute(&key.poly, &inv) {
        Ok(f) => FieldRecord {
            key: key.clone(),
            signature: f.signature(),
            h: Some(f.class_group.order),
            regulator: Some(f.units.regulator()),
            regulator_lower_bound: Some(f.regulator_lower_bound),
            failure: None,
        },
        Err(e) => {
            log::warn!("field {key}: {e}");
            FieldRecord {
                key: key.clone(),
                signature: cfg.signature,
                h: None,
                regulator: None,
                regulator_lower_bound: None,
                failure: Some(e.to_string()),
            }
        }
    }
}

/// Sweeps the box of `cfg`, then computes orders and certified field invariants for the
/// units found. Records already in `cache` are reused and new ones appended.
pub fn harvest(cfg: &SweepConfig, mut cache: Option<&mut HarvestCache>) -> Result<Harvest, HarvestError> {
    let stream = enumerate_units(cfg)?;
    let known: Vec<Option<CachedUnit>> = stream
        .units
        .iter()
        .map(|u| cache.as_ref().and_then(|c| c.unit(&u.poly).cloned()))
        .collect();
    let todo: Vec<&UnitRecord> = stream.units.iter().zip(&known).filter(|(_, k)| k.is_none()).map(|(u, _)| u).collect();
    let fresh = cfg.executor.map(todo, |u| classify(u, cfg));
    let mut fresh = fresh.into_iter();
    let mut units = Vec::with_capacity(stream.units.len());
    for (u, k) in stream.units.into_iter().zip(known) {
        let c = match k {
            Some(c) => c,
            None => {
                let c = fresh.next().unwrap();
                if let Some(cache) = cache.as_deref_mut() {
                    cache.put_unit(&u.poly, &c)?;
                }
                c
            }
        };
        units.push(UnitEntry { unit: u, key: c.key, status: c.status, orders: c.orders });
    }

    let keys: BTreeSet<&FieldKey> = units.iter().filter(|e| e.status == UnitStatus::Counted).filter_map(|e| e.key.as_ref()).collect();
    let mut fields = BTreeMap::new();
    let mut todo = Vec::new();
    for key in keys {
        match cache.as_ref().and_then(|c| c.field(key)) {
            Some(rec) => {
                fields.insert(key.clone(), rec.clone());
            }
            None => todo.push(key.clone()),
        }
    }
    for rec in cfg.executor.map(todo, |k| certify(&k, cfg)) {
        if let Some(cache) = cache.as_deref_mut() {
            cache.put_field(&rec)?;
        }
        fields.insert(rec.key.clone(), rec);
    }
    if let Some(cache) = cache {
        cache.flush()?;
    }
    Ok(Harvest { config: cfg.clone(), candidates: stream.candidates, stream_skipped: stream.skipped, units, fields })
}

impl Harvest {
    fn inside<'a>(&'a self, spec: &'a BoxSpec) -> impl Iterator<Item = &'a UnitEntry> + 'a {
        self.units.iter().filter(move |e| in_box_values(&e.unit.alpha.values, spec).unwrap_or(false))
    }

    /// hR(O_F) of the unit's field, if the unit is counted and its field certified.
    fn field_hr(&self, e: &UnitEntry) -> Result<f64, String> {
        let key = e.key.as_ref().ok_or("no field")?;
        let rec = self.fields.get(key).ok_or("no field")?;
        rec.hr().ok_or_else(|| "certification".to_string())
    }

    /// theta_S over a box inside the harvested one. Sums run in polynomial order.
    pub fn theta(&self, spec: &BoxSpec, ledger: bool) -> ThetaAccumulator {
        self.theta_filtered(spec, ledger, |_| true)
    }

    /// theta_S restricted to the fields accepted by `keep`.
    pub fn theta_filtered<F: Fn(&FieldKey) -> bool>(&self, spec: &BoxSpec, ledger: bool, keep: F) -> ThetaAccumulator {
        let mut acc = ThetaAccumulator { skipped: self.stream_skipped.clone(), terms: ledger.then(Vec::new), ..Default::default() };
        for e in self.inside(spec) {
            if let Some(k) = &e.key {
                if !keep(k) {
                    continue;
                }
            }
            match &e.status {
                UnitStatus::OutsideFamily(_) => continue,
                UnitStatus::Skipped(why) => {
                    *acc.skipped.entry(why.clone()).or_default() += 1;
                    continue;
                }
                UnitStatus::Counted => {}
            }
            let hr = match self.field_hr(e) {
                Ok(x) => x,
                Err(why) => {
                    *acc.skipped.entry(why).or_default() += 1;
                    continue;
                }
            };
            for o in &e.orders {
                let value = e.unit.multiplicity as f64 * hr * o.unit_ratio * o.lambda_s as f64;
                acc.total += value;
                acc.contributing_orders += 1;
                if let Some(terms) = acc.terms.as_mut() {
                    terms.push(ThetaTerm {
                        poly: e.unit.poly.clone(),
                        key: e.key.clone().unwrap(),
                        conductor_index: o.conductor_index.clone(),
                        multiplicity: e.unit.multiplicity,
                        hr: hr * o.unit_ratio,
                        lambda_s: o.lambda_s,
                        value,
                    });
                }
            }
        }
        acc
    }

    /// Geodesic records of the counted units in a box. The flat volume of lambda is its
    /// share sum_O hR(O) lambda_S(O) scaled by sqrt(r+s)/c, so that psi(T) ~ prod T.
    pub fn geodesics(&self, spec: &BoxSpec) -> Vec<GeodesicRecord> {
        let cfg = &self.config;
        let scale = 1.0 / constant_c(cfg.signature, cfg.degree).expect("validated signature").1;
        self.inside(spec)
            .filter(|e| e.status == UnitStatus::Counted)
            .filter_map(|e| {
                let hr = self.field_hr(e).ok()?;
                let share: f64 = e.orders.iter().map(|o| hr * o.unit_ratio * o.lambda_s as f64).sum();
                let flat = share * scale;
                Some(GeodesicRecord {
                    log_moduli: e.unit.log_moduli.clone(),
                    flat_volume: flat,
                    alpha: e.unit.alpha.clone(),
                    index_weight: crate::chamber::index_weight(flat, e.unit.det).ok()?,
                    multiplicity: e.unit.multiplicity,
                })
            })
            .collect()
    }
}

/// theta_S over the box of `cfg`, without a cache.
pub fn theta_s(cfg: &SweepConfig) -> Result<ThetaAccumulator, HarvestError> {
    Ok(harvest(cfg, None)?.theta(&cfg.box_spec, false))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub thresholds: Vec<f64>,
    pub theta: f64,
    /// theta / prod T_k, the thresholds taken as given in either convention
    pub ratio: f64,
    pub target: f64,
    pub skipped_mass: u64,
}

/// One row per box of an ascending grid; the largest box is harvested once and the
/// smaller ones are read off it.
pub fn sweep_ratios(cfg: &SweepConfig, grid: &[BoxSpec], cache: Option<&mut HarvestCache>) -> Result<Vec<SweepRow>, HarvestError> {
    let Some(last) = grid.last() else {
        return Ok(vec![]);
    };
    for w in grid.windows(2) {
        let (a, b) = (w[0].linear_bounds(), w[1].linear_bounds());
        if w[0].convention != w[1].convention || a.iter().zip(&b).any(|(x, y)| x > y) {
            return Err(HarvestError::InvalidConfig("box grid must be ascending in one convention".into()));
        }
    }
    let big = cfg.with_box(last.clone());
    let h = harvest(&big, cache)?;
    let target = constant_c(cfg.signature, cfg.degree).map_err(|e| HarvestError::InvalidConfig(e.to_string()))?.1;
    Ok(grid
        .iter()
        .map(|b| {
            let acc = h.theta(b, false);
            SweepRow { thresholds: b.thresholds.clone(), theta: acc.total, ratio: acc.total / b.volume(), target, skipped_mass: acc.skipped_mass() }
        })
        .collect())
}

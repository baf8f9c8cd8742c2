//! Sweep completeness against fundamental-unit powers, and theta bookkeeping.

use num_traits::Signed;
use pgeo_core::chamber::{BoxConvention, BoxSpec};
use pgeo_core::exactpoly::MonicIntPolynomial;
use pgeo_core::harvest::{enumerate_units, harvest, units_in_box, FieldKey, HarvestCache, SweepConfig, UnitStatus};
use pgeo_core::unitlattice::{FieldInvariants, InvariantConfig};
use std::collections::{BTreeMap, BTreeSet};

fn mult(sig: (usize, usize), t: f64) -> SweepConfig {
    let k = sig.0 + sig.1 - 1;
    SweepConfig::new(sig, &[2, 3], BoxSpec::new(vec![t; k], BoxConvention::Multiplicative).unwrap())
}

fn check_complete(cfg: &SweepConfig) {
    let h = harvest(cfg, None).unwrap();
    let mut by_field: BTreeMap<FieldKey, BTreeMap<MonicIntPolynomial, u32>> = BTreeMap::new();
    for e in &h.units {
        let key = e.key.clone().expect("every swept unit has a field");
        by_field.entry(key).or_default().insert(e.unit.poly.clone(), e.unit.multiplicity);
    }
    let mut keys: Vec<&FieldKey> = by_field.keys().collect();
    keys.sort_by_key(|k| (k.disc.abs(), (*k).clone()));
    assert!(keys.len() >= 5, "only {} fields in the box", keys.len());
    for key in &keys[..5] {
        let f = FieldInvariants::compute(&key.poly, &InvariantConfig::default()).unwrap();
        let oracle = units_in_box(&f, &cfg.box_spec);
        assert_eq!(&by_field[*key], &oracle, "field {key}");
    }
}

#[test]
fn complex_cubics_match_unit_powers() {
    check_complete(&mult((1, 1), 1e3));
}

#[test]
fn real_cubics_match_unit_powers() {
    check_complete(&mult((3, 0), 1e3));
}

#[test]
fn linear_box_matches_unit_powers() {
    let cfg = SweepConfig::new((3, 0), &[2, 3], BoxSpec::new(vec![4.0, 5.0], BoxConvention::Linear).unwrap());
    check_complete(&cfg);
}

#[test]
fn theta_is_deterministic_monotone_and_additive() {
    let cfg = mult((1, 1), 300.0);
    let a = harvest(&cfg, None).unwrap();
    let b = harvest(&cfg, None).unwrap();
    let ta = a.theta(&cfg.box_spec, true);
    assert_eq!(ta, b.theta(&cfg.box_spec, true));
    assert!(ta.total > 0.0);
    let mut last = 0.0;
    for t in [3.0, 10.0, 30.0, 100.0, 300.0] {
        let x = a.theta(&BoxSpec::new(vec![t], BoxConvention::Multiplicative).unwrap(), false).total;
        assert!(x >= last);
        last = x;
    }
    assert_eq!(last, ta.total);
    let odd = |k: &FieldKey| k.disc.bit(0);
    let split = a.theta_filtered(&cfg.box_spec, false, odd).total + a.theta_filtered(&cfg.box_spec, false, |k| !odd(k)).total;
    assert!((split - ta.total).abs() <= 1e-12 * ta.total);
}

#[test]
fn family_filter_uses_non_decomposed_primes() {
    let cfg = mult((1, 1), 300.0);
    let h = harvest(&cfg, None).unwrap();
    let outside: BTreeSet<u64> = h
        .units
        .iter()
        .filter_map(|e| match e.status {
            UnitStatus::OutsideFamily(q) => Some(q),
            _ => None,
        })
        .collect();
    assert!(outside.is_subset(&[2, 3].into()));
    assert!(!outside.is_empty());
    // theta^-1 for x^3 - x - 1: 2 and 3 are inert, lambda_S = 9
    let e = h.units.iter().find(|e| e.unit.poly == MonicIntPolynomial::from_i64(&[-1, 0, 1])).unwrap();
    assert_eq!(e.status, UnitStatus::Counted);
    assert_eq!(e.orders[0].lambda_s, 9);
}

#[test]
fn resumed_run_reproduces_cold_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    let small = mult((3, 0), 30.0);
    let big = mult((3, 0), 60.0);
    let cold = harvest(&big, None).unwrap().theta(&big.box_spec, true);
    {
        let mut c = HarvestCache::open(&path, &small).unwrap();
        harvest(&small, Some(&mut c)).unwrap();
    }
    let mut c = HarvestCache::open(&path, &big).unwrap();
    let before = c.unit_count();
    let warm = harvest(&big, Some(&mut c)).unwrap().theta(&big.box_spec, true);
    assert!(c.unit_count() > before);
    assert_eq!(cold, warm);
    drop(c);
    let mut c = HarvestCache::open(&path, &big).unwrap();
    let n = c.unit_count();
    assert_eq!(harvest(&big, Some(&mut c)).unwrap().theta(&big.box_spec, true), cold);
    assert_eq!(c.unit_count(), n);
}

#[test]
fn sequential_and_parallel_sweeps_agree() {
    let mut cfg = mult((3, 0), 40.0);
    cfg.executor = pgeo_core::Executor::Sequential;
    let a = enumerate_units(&cfg).unwrap();
    cfg.executor = pgeo_core::Executor::default();
    cfg.shards = 5;
    let b = enumerate_units(&cfg).unwrap();
    assert_eq!(a, b);
}

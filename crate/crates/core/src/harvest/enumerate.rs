//! Sweep of characteristic polynomials x^d + c_{d-1} x^{d-1} + ... + c_0 with c_0 = +-1.

use super::{coefficient_bounds, SweepConfig};
use crate::chamber::{alpha_coords, alpha_from_logs, det_for_profile, in_box, AlphaVector};
use crate::exactpoly::{approximate_roots, is_irreducible, isolate_roots, multiplicity_in_field, MonicIntPolynomial};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A unit lambda modulo +-1, represented by its canonical characteristic polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRecord {
    pub poly: MonicIntPolynomial,
    pub alpha: AlphaVector,
    /// All d values ln|root|, descending.
    pub log_moduli: Vec<f64>,
    /// det(1 - Ad | n) at the unit.
    pub det: f64,
    /// Distinct units of the field sharing this polynomial.
    pub multiplicity: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UnitStream {
    /// Sorted by polynomial.
    pub units: Vec<UnitRecord>,
    /// Candidates dropped by an error, by reason.
    pub skipped: BTreeMap<String, u64>,
    pub candidates: u64,
}

enum Verdict {
    Out,
    In(UnitRecord),
    Skip(&'static str),
}

/// Cheap test on approximate roots; false only when the candidate is clearly outside.
fn maybe_in_box(roots: &[Complex64], cfg: &SweepConfig, bounds: &[f64]) -> bool {
    let scale = roots.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let (r, s) = cfg.signature;
    let mut real: Vec<f64> = Vec::new();
    let mut cx: Vec<f64> = Vec::new();
    for z in roots {
        if z.im.abs() <= 1e-7 * scale {
            real.push(z.norm().ln());
        } else if z.im > 0.0 {
            cx.push(z.norm().ln());
        }
    }
    if real.len() != r || cx.len() != s {
        // a near-real pair is left to the certified path
        return roots.iter().any(|z| z.im.abs() > 1e-7 * scale && z.im.abs() < 1e-4 * scale);
    }
    real.sort_by(|a, b| b.total_cmp(a));
    cx.sort_by(|a, b| b.total_cmp(a));
    let a = alpha_from_logs(&real, &cx);
    a.values.iter().zip(bounds).all(|(&x, &t)| x > -1e-6 && x <= t + 1e-6)
}

fn examine(p: MonicIntPolynomial, cfg: &SweepConfig, bounds: &[f64]) -> Verdict {
    if p.canonical_sign() != p {
        return Verdict::Out;
    }
    match approximate_roots(&p) {
        Some(roots) if !maybe_in_box(&roots, cfg, bounds) => return Verdict::Out,
        _ => {}
    }
    if !is_irreducible(&p) {
        return Verdict::Out;
    }
    let profile = match isolate_roots(&p, cfg.precision_bits) {
        Ok(pr) => pr,
        Err(_) => return Verdict::Skip("root isolation"),
    };
    if profile.signature != cfg.signature {
        return Verdict::Out;
    }
    let alpha = alpha_coords(&profile);
    if !in_box(&alpha, &cfg.box_spec).unwrap_or(false) {
        return Verdict::Out;
    }
    let det = match det_for_profile(&profile) {
        Ok(x) => x,
        Err(_) => return Verdict::Skip("chamber wall"),
    };
    let multiplicity = match multiplicity_in_field(&p) {
        Ok(m) => m as u32,
        Err(_) => return Verdict::Skip("multiplicity"),
    };
    Verdict::In(UnitRecord { log_moduli: profile.log_moduli.clone(), poly: p, alpha, det, multiplicity })
}

/// Every unit modulo +-1 of a field with the configured signature whose alpha lies in
/// the box, found through its characteristic polynomial.
pub fn enumerate_units(cfg: &SweepConfig) -> Result<UnitStream, super::HarvestError> {
    cfg.validate()?;
    let d = cfg.degree;
    let b = coefficient_bounds(cfg);
    let linear = cfg.box_spec.linear_bounds();
    // c_{d-k} ranges over [-B_k, B_k]; shards split c_{d-1}
    let top = b[0];
    let width = 2 * top + 1;
    let shards = (cfg.shards as i64).min(width).max(1);
    let ranges: Vec<(i64, i64)> = (0..shards)
        .map(|i| (-top + width * i / shards, -top + width * (i + 1) / shards))
        .collect();
    let parts = cfg.executor.map(ranges, |(lo, hi)| {
        let mut out = UnitStream::default();
        // inner coefficients c_1..c_{d-2}, c_{d-k} bounded by B_k
        let inner: Vec<i64> = (2..d).map(|k| b[k - 1]).collect();
        for top_c in lo..hi {
            let mut mid: Vec<i64> = inner.iter().map(|&x| -x).collect();
            loop {
                for c0 in [-1i64, 1] {
                    let mut c = Vec::with_capacity(d);
                    c.push(c0);
                    // mid[j] is c_{d-2-j}
                    c.extend(mid.iter().rev());
                    c.push(top_c);
                    out.candidates += 1;
                    match examine(MonicIntPolynomial::from_i64(&c), cfg, &linear) {
                        Verdict::In(u) => out.units.push(u),
                        Verdict::Skip(why) => *out.skipped.entry(why.to_string()).or_default() += 1,
                        Verdict::Out => {}
                    }
                }
                let mut j = 0;
                loop {
                    if j == mid.len() {
                        break;
                    }
                    mid[j] += 1;
                    if mid[j] <= inner[j] {
                        break;
                    }
                    mid[j] = -inner[j];
                    j += 1;
                }
                if j == mid.len() {
                    break;
                }
            }
        }
        out
    });
    let mut all = UnitStream::default();
    for part in parts {
        all.units.extend(part.units);
        all.candidates += part.candidates;
        for (k, v) in part.skipped {
            *all.skipped.entry(k).or_default() += v;
        }
    }
    all.units.sort_by(|a, b| a.poly.cmp(&b.poly));
    Ok(all)
}

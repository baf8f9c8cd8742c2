//! Class group of a maximal order: relations among prime ideals below the Minkowski
//! bound, then an exact check that no candidate class of prime order is principal.

use super::context::OrderContext;
use super::units::small_elements;
use super::UnitError;
use crate::arith::intmat::{self, IMat};
use crate::arith::primes;
use crate::orderfield::{prime_decomposition, PrimeIdeal};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroup {
    pub order: u64,
    /// Invariant factors d_1 | d_2 | ..., all > 1.
    pub cyclic: Vec<u64>,
}

/// sqrt|D| (4/pi)^s d!/d^d
pub fn minkowski_bound(disc: &BigInt, degree: usize, complex_places: usize) -> f64 {
    let d = degree as f64;
    let fact: f64 = (1..=degree).map(|k| k as f64).product();
    disc.abs().to_f64().unwrap().sqrt() * (4.0 / std::f64::consts::PI).powi(complex_places as i32) * fact / d.powi(degree as i32)
}

pub(crate) struct FactorBase {
    pub(crate) ideals: Vec<PrimeIdeal>,
    by_prime: BTreeMap<u64, Vec<usize>>,
}

impl FactorBase {
    pub(crate) fn new(ctx: &OrderContext, limit: u64) -> Self {
        let mut ideals = Vec::new();
        let mut by_prime = BTreeMap::new();
        for q in primes::primes_up_to(limit) {
            let start = ideals.len();
            ideals.extend(prime_decomposition(&ctx.order, &ctx.table, q));
            by_prime.insert(q, (start..ideals.len()).collect());
        }
        FactorBase { ideals, by_prime }
    }

    pub(crate) fn len(&self) -> usize {
        self.ideals.len()
    }

    /// Exponent vector of (x) when its norm is smooth over the base.
    pub(crate) fn relation(&self, ctx: &OrderContext, x: &[BigInt]) -> Option<Vec<i64>> {
        let n = ctx.table.norm(x).abs();
        if n.is_zero() {
            return None;
        }
        let mut rest = n;
        let mut out = vec![0i64; self.len()];
        for (&q, idx) in &self.by_prime {
            let qb = BigInt::from(q);
            let mut vq = 0usize;
            while (&rest % &qb).is_zero() {
                rest /= &qb;
                vq += 1;
            }
            if vq == 0 {
                continue;
            }
            let mut seen = 0usize;
            for &i in idx {
                let p = &self.ideals[i];
                let v = p.valuation(&ctx.table, x);
                out[i] = v as i64;
                seen += v * p.f;
            }
            debug_assert_eq!(seen, vq, "valuations must account for the norm");
        }
        rest.is_one().then_some(out)
    }
}

/// Relation lattice kept in row echelon form; once of full rank the determinant
/// multiples of the unit vectors are appended so entries stay bounded.
struct Relations {
    n: usize,
    h: IMat,
}

impl Relations {
    fn add(&mut self, rows: Vec<Vec<i64>>) {
        let mut all = self.h.clone();
        all.extend(rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()));
        if let Some(det) = self.det() {
            for i in 0..self.n {
                let mut v = vec![BigInt::zero(); self.n];
                v[i] = det.clone();
                all.push(v);
            }
        }
        self.h = intmat::hnf_upper(&all);
    }

    fn det(&self) -> Option<BigInt> {
        (self.h.len() == self.n).then(|| intmat::triangular_det(&self.h).abs())
    }
}

/// Ideal arithmetic in a maximal order with reduction to small representatives.
struct Ideals<'a> {
    ctx: &'a OrderContext,
}

impl Ideals<'_> {
    fn mul(&self, a: &IMat, b: &IMat) -> IMat {
        self.ctx.table.lattice_product(a, b)
    }

    /// (y) I^-1 for a short y in I: an integral ideal in the inverse class.
    fn invert_reduce(&self, i: &IMat) -> IMat {
        let d = self.ctx.degree();
        let w = vec![0.0; d];
        let y = crate::arith::lattice::lll(i.clone(), |x| self.ctx.weighted_embedding(x, &w), 0.99)
            .into_iter()
            .min_by(|a, b| {
                let na = crate::arith::lattice::norm2(&self.ctx.weighted_embedding(a, &w));
                let nb = crate::arith::lattice::norm2(&self.ctx.weighted_embedding(b, &w));
                na.partial_cmp(&nb).unwrap()
            })
            .unwrap();
        let hy = self.ctx.table.principal_lattice(&y);
        let det = intmat::triangular_det(&hy);
        let adj = intmat::adjugate(&hy);
        let rows: IMat = (0..d)
            .map(|k| {
                let mut e = vec![BigInt::zero(); d];
                e[k] = BigInt::one();
                i.iter().flat_map(|iota| intmat::vec_mat(&self.ctx.table.mul(&e, iota), &adj)).collect()
            })
            .collect();
        intmat::hnf_lower(&intmat::kernel_mod(&rows, &det))
    }

    /// A small integral ideal in the same class.
    fn reduce(&self, i: &IMat) -> IMat {
        self.invert_reduce(&self.invert_reduce(i))
    }

    fn power_product(&self, fb: &FactorBase, e: &[BigInt]) -> IMat {
        let d = self.ctx.degree();
        let mut acc = intmat::identity(d);
        for (j, k) in e.iter().enumerate() {
            let mut k = k.to_u64().expect("reduced exponent");
            if k == 0 {
                continue;
            }
            let mut base = fb.ideals[j].basis.clone();
            while k > 0 {
                if k & 1 == 1 {
                    acc = self.reduce(&self.mul(&acc, &base));
                }
                k >>= 1;
                if k > 0 {
                    base = self.reduce(&self.mul(&base, &base));
                }
            }
        }
        acc
    }
}

/// A generator of the ideal when it is principal. `unit_logs` are per-place ln|sigma|
/// vectors of units generating a finite-index subgroup.
pub fn principal_generator(ctx: &OrderContext, ideal: &IMat, unit_logs: &[Vec<f64>]) -> Result<Option<Vec<BigInt>>, UnitError> {
    let d = ctx.degree();
    let norm = intmat::triangular_det(ideal);
    let base = norm.to_f64().unwrap().ln() / d as f64;
    let k = unit_logs.len();
    let spans: Vec<f64> = unit_logs.iter().map(|l| l.iter().fold(0.0f64, |m, x| m.max(x.abs()))).collect();
    let cells: Vec<usize> = spans.iter().map(|&m| ((k as f64 * m).ceil() as usize).max(1)).collect();
    let delta: f64 = spans.iter().zip(&cells).map(|(m, &n)| m / (2.0 * n as f64)).sum();
    let bound = d as f64 * (2.0 * delta).exp() * (1.0 + 1e-9) + 1e-9;
    let places = unit_logs.first().map_or(ctx.signature().0 + ctx.signature().1, |l| l.len());
    let mut idx = vec![0usize; k];
    loop {
        let mut w = vec![base; places];
        for (j, l) in unit_logs.iter().enumerate() {
            let t = (idx[j] as f64 + 0.5) / cells[j] as f64;
            for (wi, li) in w.iter_mut().zip(l) {
                *wi += t * li;
            }
        }
        let red = crate::arith::lattice::lll(ideal.clone(), |x| ctx.weighted_embedding(x, &w), 0.99);
        let real: Vec<Vec<f64>> = red.iter().map(|x| ctx.weighted_embedding(x, &w)).collect();
        let (coeffs, complete) = crate::arith::lattice::short_vectors(&real, bound, 200_000);
        if !complete {
            return Err(UnitError::CertificationFailed("principality enumeration overflow".into()));
        }
        for c in coeffs {
            let x = crate::arith::lattice::combine(&c, &red);
            if ctx.table.norm(&x).abs() == norm {
                return Ok(Some(x));
            }
        }
        let mut j = 0;
        loop {
            if j == k {
                return Ok(None);
            }
            idx[j] += 1;
            if idx[j] < cells[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassGroupConfig {
    pub minkowski_cap: f64,
    pub batches: usize,
}

impl Default for ClassGroupConfig {
    fn default() -> Self {
        ClassGroupConfig { minkowski_cap: 50_000.0, batches: 60 }
    }
}

/// Class group of the maximal order in `ctx`; `unit_logs` as for `principal_generator`.
pub fn class_group(
    ctx: &OrderContext,
    field_disc: &BigInt,
    unit_logs: &[Vec<f64>],
    cfg: &ClassGroupConfig,
) -> Result<ClassGroup, UnitError> {
    let d = ctx.degree();
    let (r, s) = ctx.signature();
    let mk = minkowski_bound(field_disc, d, s);
    if mk > cfg.minkowski_cap {
        return Err(UnitError::BoundTooLarge { bound: mk, cap: cfg.minkowski_cap });
    }
    if mk < 2.0 {
        return Ok(ClassGroup { order: 1, cyclic: vec![] });
    }
    let fb = FactorBase::new(ctx, (mk.ceil() as u64).max(20));
    let n = fb.len();
    let mut rel = Relations { n, h: vec![] };
    // (q) = prod P^e
    let free: Vec<Vec<i64>> = fb
        .by_prime
        .values()
        .map(|idx| {
            let mut v = vec![0i64; n];
            for &i in idx {
                v[i] = fb.ideals[i].e as i64;
            }
            v
        })
        .collect();
    rel.add(free);
    let mut rng = ChaCha8Rng::seed_from_u64(0xc1a55 ^ field_disc.to_u64_digits().1.first().copied().unwrap_or(0));
    let ideals = Ideals { ctx };
    let mut last: Option<BigInt> = None;
    let mut stable = 0;
    let ident = intmat::identity(d);
    for batch in 0..cfg.batches {
        let mut rows = Vec::new();
        let spread = 0.4 * (1 + batch / 4) as f64;
        let mut lattices: Vec<IMat> = vec![ident.clone()];
        lattices.extend(fb.ideals.iter().map(|p| p.basis.clone()));
        if batch > 0 {
            // random products of two base ideals
            for _ in 0..n.min(8) {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                lattices.push(ideals.reduce(&ideals.mul(&fb.ideals[a].basis, &fb.ideals[b].basis)));
            }
        }
        for lat in &lattices {
            let w: Vec<f64> = (0..r + s).map(|_| rng.gen_range(-spread..spread)).collect();
            for x in small_elements(ctx, lat, &w, 2.0, 24) {
                if let Some(v) = fb.relation(ctx, &x) {
                    rows.push(v);
                }
            }
        }
        rel.add(rows);
        let det = rel.det();
        if det.is_some() && det == last {
            stable += 1;
        } else {
            stable = 0;
        }
        last = det;
        if stable >= 2 || last.as_ref().is_some_and(|x| x.is_one()) {
            break;
        }
    }
    if rel.det().is_none() {
        return Err(UnitError::CertificationFailed(format!(
            "relation lattice rank {} of {n}",
            rel.h.len()
        )));
    }
    // every candidate class of prime order must be non-principal
    'certify: loop {
        let (diag, w) = intmat::smith_generators(&rel.h);
        let h = intmat::triangular_det(&rel.h).abs();
        let factors: Vec<(BigInt, IMat)> = diag
            .iter()
            .zip(w.iter())
            .filter(|(x, _)| !x.is_one())
            .map(|(x, row)| (x.abs(), vec![row.clone()]))
            .collect();
        if h.is_one() {
            return Ok(ClassGroup { order: 1, cyclic: vec![] });
        }
        let exponent = factors.iter().fold(BigInt::one(), |a, (x, _)| a.lcm(x));
        for (l, _) in primes::factorize(&h) {
            let l = BigInt::from(l);
            let idx: Vec<usize> = (0..factors.len()).filter(|&i| (&factors[i].0 % &l).is_zero()).collect();
            let lu = l.to_u64().unwrap();
            let t = idx.len();
            // projective points of F_l^t
            let mut a = vec![0u64; t];
            loop {
                let mut j = 0;
                loop {
                    if j == t {
                        break;
                    }
                    a[j] += 1;
                    if a[j] < lu {
                        break;
                    }
                    a[j] = 0;
                    j += 1;
                }
                if j == t {
                    break;
                }
                let lead = a.iter().rev().find(|&&x| x != 0).copied();
                if lead != Some(1) {
                    continue;
                }
                let mut e = vec![BigInt::zero(); n];
                for (&ai, &fi) in a.iter().zip(&idx) {
                    let scale = BigInt::from(ai) * (&factors[fi].0 / &l);
                    for (ej, wj) in e.iter_mut().zip(&factors[fi].1[0]) {
                        *ej += &scale * wj;
                    }
                }
                let e: Vec<BigInt> = e.into_iter().map(|x| x.mod_floor(&exponent)).collect();
                let ideal = ideals.power_product(&fb, &e);
                if principal_generator(ctx, &ideal, unit_logs)?.is_some() {
                    log::debug!("class of order {l} turned out principal; adding relation");
                    rel.add(vec![e.iter().map(|x| x.to_i64().unwrap()).collect()]);
                    continue 'certify;
                }
            }
        }
        let cyclic: Vec<u64> = factors.iter().map(|(x, _)| x.to_u64().unwrap()).collect();
        return Ok(ClassGroup { order: h.to_u64().unwrap(), cyclic });
    }
}

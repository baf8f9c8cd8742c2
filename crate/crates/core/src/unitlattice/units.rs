//! Unit search by small elements of equal ideal, reduction of the log lattice, and
//! certification of fundamentality through a regulator lower bound plus saturation.

use super::context::{abs_det, OrderContext};
use super::UnitError;
use crate::arith::fq;
use crate::arith::intmat::IMat;
use crate::arith::lattice;
use crate::arith::primes;
use crate::exactpoly::discriminant;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use super::classgroup::FactorBase;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet};

#[derive(Clone, Debug)]
pub struct UnitSearchConfig {
    /// Shells of the weight grid tried before giving up on full rank.
    pub max_rounds: usize,
    /// Grid spacing in log space.
    pub step: f64,
    /// Elements kept per reduced lattice.
    pub per_lattice_cap: usize,
    /// Character budget per saturation prime.
    pub max_characters: usize,
    /// Largest saturation prime attempted.
    pub max_saturation_prime: u64,
    /// Primes up to this bound make up the factor base of the relation search.
    pub factor_base_limit: u64,
    /// Batches of the relation search run when the shells fall short of full rank.
    pub relation_batches: usize,
}

impl Default for UnitSearchConfig {
    fn default() -> Self {
        UnitSearchConfig {
            max_rounds: 6,
            step: 0.7,
            per_lattice_cap: 48,
            max_characters: 400,
            max_saturation_prime: 50_000,
            factor_base_limit: 40,
            relation_batches: 40,
        }
    }
}

/// Units with their per-place log vectors (regulator convention).
#[derive(Clone, Debug)]
pub(crate) struct LogBasis {
    pub units: Vec<Vec<BigInt>>,
    pub logs: Vec<Vec<f64>>,
}

const SCALE: f64 = 1_048_576.0;

fn log_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl LogBasis {
    fn new() -> Self {
        LogBasis { units: vec![], logs: vec![] }
    }

    fn rank(&self) -> usize {
        self.units.len()
    }

    /// Least-squares coordinates of v in the current basis and the residual length.
    fn project(&self, v: &[f64]) -> (Vec<f64>, f64) {
        let k = self.logs.len();
        if k == 0 {
            return (vec![], log_norm(v));
        }
        let gram: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| dot(&self.logs[i], &self.logs[j])).collect())
            .collect();
        let rhs: Vec<f64> = (0..k).map(|i| dot(&self.logs[i], v)).collect();
        let c = super::context::solve_dense(gram, rhs).unwrap_or_else(|| vec![0.0; k]);
        let mut res = v.to_vec();
        for (ci, l) in c.iter().zip(&self.logs) {
            for (r, x) in res.iter_mut().zip(l) {
                *r -= ci * x;
            }
        }
        (c, log_norm(&res))
    }

    /// Adds a unit; returns true when the lattice grew.
    fn add(&mut self, ctx: &OrderContext, u: Vec<BigInt>) -> bool {
        let l = reg_logs(ctx, &u);
        if log_norm(&l) < 1e-6 {
            return false;
        }
        let (c, res) = self.project(&l);
        if res > 1e-6 {
            self.units.push(u);
            self.logs.push(l);
            self.reduce(ctx);
            return true;
        }
        if c.iter().all(|x| (x - x.round()).abs() < 1e-5) {
            return false;
        }
        // u = prod b_i^(p_i / q); the enlarged lattice comes from the Hermite form of
        // [q I ; p] with the transform tracked alongside
        let Some(q) = (2..=10_000i64).find(|&q| c.iter().all(|x| (x * q as f64 - (x * q as f64).round()).abs() < 1e-4)) else {
            log::warn!("unit with irrational-looking coordinates {c:?} ignored");
            return false;
        };
        let k = self.units.len();
        let rows: IMat = (0..=k)
            .map(|i| {
                let mut r: Vec<BigInt> = if i < k {
                    (0..k).map(|j| BigInt::from(if i == j { q } else { 0 })).collect()
                } else {
                    c.iter().map(|x| BigInt::from((x * q as f64).round() as i64)).collect()
                };
                r.extend((0..=k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
                r
            })
            .collect();
        let mut all = self.units.clone();
        all.push(u);
        let h = crate::arith::intmat::hnf_upper(&rows);
        let mut units = Vec::with_capacity(k);
        for row in h.iter().filter(|r| r[..k].iter().any(|x| !x.is_zero())) {
            units.push(product(ctx, &all, &row[k..]));
        }
        self.logs = units.iter().map(|u| reg_logs(ctx, u)).collect();
        self.units = units;
        self.reduce(ctx);
        true
    }

    /// LLL on exponent vectors of an independent system.
    fn reduce(&mut self, ctx: &OrderContext) {
        let m = self.units.len();
        let logs = self.logs.clone();
        let embed = |c: &[BigInt]| -> Vec<f64> {
            let cf: Vec<f64> = c.iter().map(|x| x.to_f64().unwrap()).collect();
            let out: Vec<f64> = (0..logs[0].len())
                .map(|j| SCALE * cf.iter().zip(&logs).map(|(a, l)| a * l[j]).sum::<f64>())
                .collect();
            out
        };
        let red = lattice::lll(crate::arith::intmat::identity(m), embed, 0.99);
        let mut units = Vec::new();
        let mut new_logs = Vec::new();
        for row in red {
            let l: Vec<f64> = (0..logs[0].len())
                .map(|j| row.iter().zip(&logs).map(|(a, l)| a.to_f64().unwrap() * l[j]).sum())
                .collect();
            if log_norm(&l) < 1e-4 {
                continue;
            }
            let u = product(ctx, &self.units, &row);
            let fresh = reg_logs(ctx, &u);
            units.push(ctx.normalize_sign(u));
            new_logs.push(if fresh.iter().all(|x| x.is_finite()) { fresh } else { l });
        }
        self.units = units;
        self.logs = new_logs;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Regulator-convention logs in fixed point: double-precision embeddings of a unit
/// cancel badly at the places where it is small.
fn reg_logs(ctx: &OrderContext, u: &[BigInt]) -> Vec<f64> {
    ctx.log_vector(u)
}

/// prod units_i ^ e_i, exactly.
pub(crate) fn product(ctx: &OrderContext, units: &[Vec<BigInt>], e: &[BigInt]) -> Vec<BigInt> {
    let t = &ctx.table;
    let mut acc = t.one();
    for (u, k) in units.iter().zip(e) {
        if k.is_zero() {
            continue;
        }
        let k = k.to_i64().expect("exponent fits in i64");
        let p = t.pow_signed(u, k).expect("units are invertible");
        acc = t.mul(&acc, &p);
    }
    acc
}

/// |det| of the log matrix with the last place deleted.
pub(crate) fn regulator_of(logs: &[Vec<f64>]) -> f64 {
    let k = logs.len();
    if k == 0 {
        return 1.0;
    }
    abs_det(logs.iter().map(|l| l[..k].to_vec()).collect())
}

/// Weight vectors on the shell max|t_i| = rho of the grid in the trace-zero hyperplane.
fn shell(ctx: &OrderContext, rho: i64, step: f64) -> Vec<Vec<f64>> {
    let k = ctx.unit_rank();
    let n = ctx.place_weights();
    let mut out = Vec::new();
    let mut t = vec![-rho; k];
    loop {
        if t.iter().any(|x| x.abs() == rho) || rho == 0 {
            let mut w: Vec<f64> = t.iter().map(|&x| x as f64 * step).collect();
            let s: f64 = w.iter().zip(&n).map(|(a, b)| a * b).sum();
            w.push(-s / n[k]);
            out.push(w);
        }
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            t[i] += 1;
            if t[i] <= rho {
                break;
            }
            t[i] = -rho;
            i += 1;
        }
    }
}

/// Small elements of the lattice with rows `basis` (order coordinates) under the T2 form
/// weighted by w.
pub(crate) fn small_elements(ctx: &OrderContext, basis: &IMat, w: &[f64], factor: f64, cap: usize) -> Vec<Vec<BigInt>> {
    let red = lattice::lll(basis.clone(), |x| ctx.weighted_embedding(x, w), 0.99);
    let real: Vec<Vec<f64>> = red.iter().map(|x| ctx.weighted_embedding(x, w)).collect();
    let first = real.iter().map(|v| lattice::norm2(v)).fold(f64::INFINITY, f64::min);
    let (coeffs, _) = lattice::short_vectors(&real, factor * first, cap);
    let mut out: Vec<Vec<BigInt>> = coeffs.iter().map(|c| lattice::combine(c, &red)).collect();
    out.extend(red);
    out
}

/// Finds a full-rank unit lattice and certifies that it is the whole unit group modulo
/// torsion, given a proven lower bound for the regulator.
pub fn fundamental_system(ctx: &OrderContext, lower: f64, cfg: &UnitSearchConfig) -> Result<Vec<Vec<BigInt>>, UnitError> {
    assert!(ctx.signature().0 >= 1, "torsion is +-1 only with a real place; even degree is not supported");
    let k = ctx.unit_rank();
    if k == 0 {
        return Err(UnitError::RankZero);
    }
    let d = ctx.degree();
    let ident = crate::arith::intmat::identity(d);
    let mut basis = LogBasis::new();
    let mut buckets: HashMap<IMat, Vec<BigInt>> = HashMap::new();
    let mut full_rounds = 0;
    let mut rho = 0;
    while full_rounds < 2 && rho as usize <= cfg.max_rounds {
        for w in shell(ctx, rho, cfg.step) {
            for x in small_elements(ctx, &ident, &w, 3.0, cfg.per_lattice_cap) {
                let n = ctx.table.norm(&x).abs();
                if n.is_zero() {
                    continue;
                }
                if n.is_one() {
                    basis.add(ctx, x);
                    continue;
                }
                if n > BigInt::from(1_000_000u32) {
                    continue;
                }
                let key = ctx.table.principal_lattice(&x);
                match buckets.get(&key) {
                    Some(y) => {
                        if let Some(u) = ctx.table.div(&x, y) {
                            debug_assert!(ctx.is_unit(&u));
                            basis.add(ctx, u);
                        }
                    }
                    None => {
                        buckets.insert(key, x);
                    }
                }
            }
        }
        if basis.rank() == k {
            full_rounds += 1;
        }
        rho += 1;
    }
    if basis.rank() < k {
        relation_search(ctx, &mut basis, cfg);
    }
    if basis.rank() < k {
        return Err(UnitError::CertificationFailed(format!(
            "unit rank {} of {k} after {} weight shells and {} relation batches",
            basis.rank(),
            cfg.max_rounds,
            cfg.relation_batches
        )));
    }
    certify(ctx, basis, lower, cfg)
}

/// Elements with smooth norm give exponent vectors over a factor base; integer
/// combinations in the kernel are units, however large the regulator.
fn relation_search(ctx: &OrderContext, basis: &mut LogBasis, cfg: &UnitSearchConfig) {
    let k = ctx.unit_rank();
    let fb = FactorBase::new(ctx, cfg.factor_base_limit);
    let n = fb.len();
    let mut lattices = vec![crate::arith::intmat::identity(ctx.degree())];
    lattices.extend(fb.ideals.iter().map(|p| p.basis.clone()));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0417);
    let places = ctx.signature().0 + ctx.signature().1;
    let mut extra = 0;
    for batch in 0..cfg.relation_batches {
        let spread = 0.5 * (1 + batch) as f64;
        let mut seen = HashSet::new();
        let mut elems = Vec::new();
        let mut vals = Vec::new();
        'fill: for _ in 0..4 {
            for lat in &lattices {
                let w: Vec<f64> = (0..places).map(|_| rng.gen_range(-spread..=spread)).collect();
                for x in small_elements(ctx, lat, &w, 2.0, 8) {
                    let x = ctx.normalize_sign(x);
                    if !seen.insert(x.clone()) {
                        continue;
                    }
                    if let Some(v) = fb.relation(ctx, &x) {
                        elems.push(x);
                        vals.push(v);
                        if elems.len() >= n + 24 {
                            break 'fill;
                        }
                    }
                }
            }
        }
        for u in kernel_units(ctx, &elems, &vals) {
            basis.add(ctx, u);
        }
        if basis.rank() == k {
            extra += 1;
            if extra >= 2 {
                return;
            }
        }
    }
}

/// Units prod x_i^c_i for c in the integer kernel of the exponent matrix, reduced so
/// that the log vectors are short.
fn kernel_units(ctx: &OrderContext, elems: &[Vec<BigInt>], vals: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let m = elems.len();
    if m == 0 {
        return vec![];
    }
    let n = vals[0].len();
    let rows: IMat = vals
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut r: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
            r.extend((0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let kernel: IMat = crate::arith::intmat::hnf_upper(&rows)
        .into_iter()
        .filter(|r| r[..n].iter().all(|x| x.is_zero()))
        .map(|r| r[n..].to_vec())
        .collect();
    if kernel.is_empty() {
        return vec![];
    }
    let kernel = lattice::lll(kernel, lattice::to_f64_vec, 0.99);
    let elem_logs: Vec<Vec<f64>> = elems.iter().map(|x| reg_logs(ctx, x)).collect();
    let places = elem_logs[0].len();
    let combine_logs = |c: &[BigInt]| -> Vec<f64> {
        (0..places)
            .map(|j| c.iter().zip(&elem_logs).map(|(a, l)| a.to_f64().unwrap() * l[j]).sum())
            .collect()
    };
    let exps = |a: &[BigInt]| -> Vec<BigInt> {
        let mut c = vec![BigInt::zero(); m];
        for (aj, kj) in a.iter().zip(&kernel) {
            if !aj.is_zero() {
                for (ci, x) in c.iter_mut().zip(kj) {
                    *ci += aj * x;
                }
            }
        }
        c
    };
    let red = lattice::lll(
        crate::arith::intmat::identity(kernel.len()),
        |a| {
            let c = exps(a);
            let mut out: Vec<f64> = combine_logs(&c).into_iter().map(|x| SCALE * x).collect();
            out.extend(lattice::to_f64_vec(&c));
            out
        },
        0.99,
    );
    let mut out = Vec::new();
    for a in red {
        let c = exps(&a);
        let l = combine_logs(&c);
        if log_norm(&l) < 1e-4 || log_norm(&l) > 5000.0 {
            continue;
        }
        let t = &ctx.table;
        let (mut num, mut den) = (t.one(), t.one());
        for (x, ci) in elems.iter().zip(&c) {
            let e = ci.abs().to_u64().unwrap();
            if e == 0 {
                continue;
            }
            let p = t.pow(x, e);
            if ci.is_positive() {
                num = t.mul(&num, &p);
            } else {
                den = t.mul(&den, &p);
            }
        }
        if let Some(u) = t.div(&num, &den) {
            if ctx.is_unit(&u) {
                out.push(u);
            }
        }
    }
    out
}

fn certify(ctx: &OrderContext, mut basis: LogBasis, lower: f64, cfg: &UnitSearchConfig) -> Result<Vec<Vec<BigInt>>, UnitError> {
    let disc = discriminant(&ctx.order.poly);
    'outer: loop {
        let logs: Vec<Vec<f64>> = basis.units.iter().map(|u| ctx.log_vector(u)).collect();
        let reg = regulator_of(&logs);
        let bound = reg / lower;
        if bound >= cfg.max_saturation_prime as f64 {
            return Err(UnitError::CertificationFailed(format!(
                "index bound {bound:.1} exceeds the saturation cap"
            )));
        }
        // index = reg / R_true <= bound, so only primes up to the bound can divide it
        for l in primes::primes_up_to(bound.floor().max(1.0) as u64) {
            if let Some(units) = saturate(ctx, &basis.units, l, &disc, cfg)? {
                let mut next = LogBasis::new();
                for u in units {
                    next.add(ctx, u);
                }
                basis = next;
                continue 'outer;
            }
        }
        return Ok(basis.units);
    }
}

/// Character at a degree-one prime (q, theta -> root): images of the order basis.
fn basis_images(ctx: &OrderContext, q: u64, root: u64) -> Option<Vec<u64>> {
    let den = fq::reduce_big(&ctx.order.denominator, q);
    if den == 0 {
        return None;
    }
    let dinv = fq::invm(den, q);
    Some(
        ctx.order
            .matrix
            .iter()
            .map(|row| {
                let v: Vec<u64> = row.iter().map(|c| fq::reduce_big(c, q)).collect();
                fq::mulm(fq::peval(&v, root, q), dinv, q)
            })
            .collect(),
    )
}

fn image(x: &[BigInt], b: &[u64], q: u64) -> u64 {
    x.iter().zip(b).fold(0, |acc, (c, &bi)| fq::addm(acc, fq::mulm(fq::reduce_big(c, q), bi, q), q))
}

/// Tests whether the lattice generated by `units` (and -1) is l-saturated; returns a
/// strictly larger system when an l-th root is found.
fn saturate(
    ctx: &OrderContext,
    units: &[Vec<BigInt>],
    l: u64,
    disc: &BigInt,
    cfg: &UnitSearchConfig,
) -> Result<Option<Vec<Vec<BigInt>>>, UnitError> {
    let mut gens: Vec<Vec<BigInt>> = Vec::new();
    if l == 2 {
        gens.push(ctx.table.scalar(&BigInt::from(-1)));
    }
    gens.extend(units.iter().cloned());
    let g = gens.len();
    let full = ctx.order.poly.full();
    let mut rows: fq::FqMat = Vec::new();
    let mut rank = 0;
    let mut tried_kernels = 0;
    let mut q = l + 1;
    while rows.len() < cfg.max_characters {
        if !primes::is_prime(q) || (disc % BigInt::from(q)).is_zero() || (&ctx.order.denominator % q).is_zero() {
            q += l;
            continue;
        }
        let e = (q - 1) / l;
        // generator of the l-th roots of unity
        let zeta = (2..q).map(|a| fq::powm(a, e, q)).find(|&z| z != 1).unwrap();
        let mut table = HashMap::new();
        let mut z = 1u64;
        for j in 0..l {
            table.insert(z, j);
            z = fq::mulm(z, zeta, q);
        }
        let fp: Vec<u64> = full.iter().map(|c| fq::reduce_big(c, q)).collect();
        for root in fq::roots(&fp, q) {
            let Some(b) = basis_images(ctx, q, root) else { continue };
            let row: Vec<u64> = gens.iter().map(|x| table[&fq::powm(image(x, &b, q), e, q)]).collect();
            rows.push(row);
        }
        q += l;
        let new_rank = fq::rank(&rows, l);
        if new_rank == g {
            return Ok(None);
        }
        rank = new_rank;
        // after a generous surplus of characters, try the kernel for genuine roots
        if rows.len() >= g + 12 + 12 * tried_kernels {
            tried_kernels += 1;
            for v in fq::kernel(&rows, g, l) {
                let e_vec: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
                let w = product(ctx, &gens, &e_vec);
                if let Some(x) = lth_root(ctx, &w, l) {
                    let offset = if l == 2 { 1 } else { 0 };
                    let j = (offset..g).find(|&j| v[j] != 0);
                    let Some(j) = j else { continue };
                    let mut out = units.to_vec();
                    out[j - offset] = x;
                    log::debug!("saturation at {l}: found an l-th root");
                    return Ok(Some(out));
                }
            }
        }
    }
    Err(UnitError::CertificationFailed(format!(
        "saturation at {l}: character rank {rank} of {g} after {} characters",
        rows.len()
    )))
}

/// An l-th root of w inside the order, if one exists.
pub(crate) fn lth_root(ctx: &OrderContext, w: &[BigInt], l: u64) -> Option<Vec<BigInt>> {
    let (r, s) = ctx.signature();
    let z = ctx.embed(w);
    let lf = l as f64;
    let mut real = Vec::with_capacity(r);
    for zi in &z[..r] {
        let x = zi.re;
        if l % 2 == 0 && x < 0.0 {
            return None;
        }
        real.push(x.signum() * x.abs().powf(1.0 / lf));
    }
    let mut branches = vec![0u64; s + r];
    loop {
        let mut target: Vec<Complex64> = Vec::with_capacity(r + s);
        for (i, x) in real.iter().enumerate() {
            let sign = if l % 2 == 0 && i > 0 && branches[s + i] == 1 { -1.0 } else { 1.0 };
            target.push(Complex64::new(sign * x, 0.0));
        }
        for j in 0..s {
            let zj = z[r + j];
            let m = zj.norm().powf(1.0 / lf);
            let a = (zj.arg() + 2.0 * std::f64::consts::PI * branches[j] as f64) / lf;
            target.push(Complex64::from_polar(m, a));
        }
        if let Some(x) = ctx.from_embeddings(&target) {
            if ctx.table.pow(&x, l) == w {
                return Some(x);
            }
        }
        // next branch: complex places take l values, real places (l even, after the
        // first) take a sign
        let mut i = 0;
        loop {
            if i == s + r {
                return None;
            }
            let limit = if i < s { l } else if l % 2 == 0 && i > s { 2 } else { 1 };
            branches[i] += 1;
            if branches[i] < limit {
                break;
            }
            branches[i] = 0;
            i += 1;
        }
    }
}

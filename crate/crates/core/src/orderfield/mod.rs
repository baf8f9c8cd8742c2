//! Orders in F = Q[x]/(p): the maximal order by Round 2, prime splitting, the orders
//! between Z[theta] and O_F, and conductor unit counts.

mod algebra;
mod table;

pub use algebra::{FpAlgebra, MaxIdeal, Reducer};
pub use table::MultTable;

use crate::arith::fq::{self, FqMat};
use crate::arith::intmat::{self, IMat};
use crate::arith::primes;
use crate::arith::zpoly::{self, ZPoly};
use crate::exactpoly::{discriminant, MonicIntPolynomial};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub const DEFAULT_INDEX_CAP: u64 = 10_000;
pub const DEFAULT_CONDUCTOR_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum OrderError {
    #[error("index {index} exceeds the cap {cap}")]
    IndexCapExceeded { index: BigInt, cap: u64 },
    #[error("conductor norm {norm} exceeds the enumeration cap {cap}")]
    ConductorTooLarge { norm: BigInt, cap: u64 },
    #[error("prime {0} is decomposed in the field")]
    Decomposed(u64),
}

/// Z-basis b_i = matrix[i] / denominator over the power basis 1, theta, ..., theta^(d-1),
/// lower triangular in Hermite form; b_0 = 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderBasis {
    pub poly: MonicIntPolynomial,
    pub matrix: IMat,
    pub denominator: BigInt,
}

impl OrderBasis {
    /// Z[theta].
    pub fn equation_order(p: &MonicIntPolynomial) -> Self {
        OrderBasis { poly: p.clone(), matrix: intmat::identity(p.degree()), denominator: BigInt::one() }
    }

    /// The lattice spanned by rows / den, put in Hermite form with a reduced denominator.
    pub fn from_generators(p: &MonicIntPolynomial, rows: &[Vec<BigInt>], den: &BigInt) -> Self {
        let h = intmat::hnf_lower(rows);
        assert_eq!(h.len(), p.degree(), "generators do not span a full lattice");
        let g = h.iter().flatten().fold(den.clone(), |g, x| g.gcd(x));
        let matrix = h.iter().map(|r| r.iter().map(|x| x / &g).collect()).collect();
        OrderBasis { poly: p.clone(), matrix, denominator: den / g }
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    /// [O : Z[theta]] = D^d / det(M).
    pub fn index(&self) -> BigInt {
        let num = num_traits::pow(self.denominator.clone(), self.degree());
        num / intmat::triangular_det(&self.matrix)
    }

    pub fn discriminant(&self) -> BigInt {
        let i = self.index();
        discriminant(&self.poly) / (&i * &i)
    }

    /// Power-basis numerators (common denominator `self.denominator`) of an element.
    pub fn to_power_basis(&self, coords: &[BigInt]) -> Vec<BigInt> {
        intmat::vec_mat(coords, &self.matrix)
    }

    /// Coordinates of num/den, when that element lies in the order.
    pub fn coords_of(&self, num: &[BigInt], den: &BigInt) -> Option<Vec<BigInt>> {
        let d = self.degree();
        let mut v: Vec<BigInt> = num.iter().map(|x| x * &self.denominator).collect();
        v.resize(d, BigInt::zero());
        let h: IMat = self.matrix.iter().map(|r| r.iter().map(|x| x * den).collect()).collect();
        intmat::solve_lower_integral(&h, &v)
    }

    /// Coordinates of theta^k.
    pub fn theta_power(&self, k: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.degree()];
        v[k] = BigInt::one();
        self.coords_of(&v, &BigInt::one()).expect("order contains Z[theta]")
    }

    fn product_power_basis(&self, a: &[BigInt], b: &[BigInt]) -> ZPoly {
        let full = self.poly.full();
        let mut r = zpoly::divrem_monic(&zpoly::mul(&a.to_vec(), &b.to_vec()), &full).1;
        r.resize(self.degree(), BigInt::zero());
        r
    }

    /// Structure constants, or None when the lattice is not closed under products.
    pub fn try_mult_table(&self) -> Option<MultTable> {
        let d = self.degree();
        let den2 = &self.denominator * &self.denominator;
        let mut t = vec![vec![Vec::new(); d]; d];
        for i in 0..d {
            for j in i..d {
                let prod = self.product_power_basis(&self.matrix[i], &self.matrix[j]);
                let c = self.coords_of(&prod, &den2)?;
                t[j][i] = c.clone();
                t[i][j] = c;
            }
        }
        Some(MultTable { t })
    }

    pub fn mult_table(&self) -> MultTable {
        self.try_mult_table().expect("lattice is not a ring")
    }

    /// Ring closure test.
    pub fn is_ring(&self) -> bool {
        self.try_mult_table().is_some()
    }

    pub fn contains(&self, other: &OrderBasis) -> bool {
        other.matrix.iter().all(|r| self.coords_of(r, &other.denominator).is_some())
    }

    /// Rows of `other`'s basis expressed in this order's coordinates.
    pub fn relative_matrix(&self, other: &OrderBasis) -> Option<IMat> {
        other.matrix.iter().map(|r| self.coords_of(r, &other.denominator)).collect()
    }

    /// Sub-lattice given by integer rows in this order's coordinates.
    pub fn sublattice(&self, rows: &[Vec<BigInt>]) -> OrderBasis {
        let power: IMat = rows.iter().map(|r| self.to_power_basis(r)).collect();
        OrderBasis::from_generators(&self.poly, &power, &self.denominator)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalOrder {
    pub basis: OrderBasis,
    pub field_discriminant: BigInt,
    pub index: BigInt,
}

/// Ring of integers via Round 2 at every prime whose square divides disc(p).
pub fn maximal_order(p: &MonicIntPolynomial) -> MaximalOrder {
    let disc = discriminant(p);
    let mut order = OrderBasis::equation_order(p);
    for q in primes::square_divisors(&disc) {
        if dedekind_p_maximal(p, q) {
            continue;
        }
        order = round2_at(&order, q);
    }
    let index = order.index();
    let field_discriminant = &disc / (&index * &index);
    MaximalOrder { basis: order, field_discriminant, index }
}

/// Enlarges an order until it is q-maximal, by repeatedly taking the multiplier ring of
/// the q-radical.
fn round2_at(start: &OrderBasis, q: u64) -> OrderBasis {
    let mut order = start.clone();
    let qb = BigInt::from(q);
    loop {
        let d = order.degree();
        let table = order.mult_table();
        let alg = FpAlgebra::new(q, table.reduce(q));
        let rad = alg.radical();
        // I = qO + lift(rad), coordinates in O
        let mut rows: IMat = (0..d)
            .map(|i| (0..d).map(|j| if i == j { qb.clone() } else { BigInt::zero() }).collect())
            .collect();
        rows.extend(rad.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()));
        let ideal = intmat::hnf_lower(&rows);
        // U = {y in O : y I in q I}
        let adj = intmat::adjugate(&ideal);
        let modulus = &qb * intmat::triangular_det(&ideal);
        let mrows: IMat = (0..d)
            .map(|k| {
                let mut e = vec![BigInt::zero(); d];
                e[k] = BigInt::one();
                ideal
                    .iter()
                    .flat_map(|iota| intmat::vec_mat(&table.mul(&e, iota), &adj))
                    .collect()
            })
            .collect();
        let u = intmat::kernel_mod(&mrows, &modulus);
        let power: IMat = u.iter().map(|r| order.to_power_basis(r)).collect();
        let next = OrderBasis::from_generators(&order.poly, &power, &(&order.denominator * &qb));
        if next.index() == order.index() {
            return order;
        }
        order = next;
    }
}

fn to_fp(f: &ZPoly, q: u64) -> Vec<u64> {
    let mut v: Vec<u64> = f.iter().map(|c| fq::reduce_big(c, q)).collect();
    fq::ptrim(&mut v);
    v
}

/// Dedekind criterion: Z[theta] is q-maximal iff gcd(g, h, F) = 1 mod q, where
/// p = prod g_i^e_i mod q, g = prod g_i, h = p / g and F = (g h - p) / q.
pub fn dedekind_p_maximal(p: &MonicIntPolynomial, q: u64) -> bool {
    let full = p.full();
    let fac = fq::factor(&to_fp(&full, q), q);
    if fac.iter().all(|(_, e)| *e == 1) {
        return true;
    }
    let mut g: Vec<u64> = vec![1];
    let mut h: Vec<u64> = vec![1];
    for (gi, e) in &fac {
        g = fq::pmul(&g, gi, q);
        for _ in 1..*e {
            h = fq::pmul(&h, gi, q);
        }
    }
    let lift = |v: &Vec<u64>| -> ZPoly { v.iter().map(|&x| BigInt::from(x)).collect() };
    let gh = zpoly::mul(&lift(&g), &lift(&h));
    let diff = zpoly::sub(&gh, &full);
    let qb = BigInt::from(q);
    let f_big: ZPoly = diff.iter().map(|c| c / &qb).collect();
    let f = to_fp(&f_big, q);
    let t = fq::pgcd(&fq::pgcd(&g, &h, q), &f, q);
    fq::pdeg(&t) == Some(0)
}

/// Shape of q O_F.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingType {
    pub prime: u64,
    /// (ramification index, residue degree), sorted.
    pub factors: Vec<(usize, usize)>,
}

impl SplittingType {
    pub fn is_non_decomposed(&self) -> bool {
        self.factors.len() == 1
    }

    /// Inertia degree when non-decomposed.
    pub fn inertia_degree(&self) -> Option<usize> {
        self.is_non_decomposed().then(|| self.factors[0].1)
    }
}

/// Splitting of q in the field of the maximal order.
pub fn splitting_type(max: &OrderBasis, p: &MonicIntPolynomial, q: u64) -> SplittingType {
    let qb = BigInt::from(q);
    let mut factors: Vec<(usize, usize)> = if !(max.index() % &qb).is_zero() {
        fq::factor(&to_fp(&p.full(), q), q).into_iter().map(|(g, e)| (e, g.len() - 1)).collect()
    } else {
        prime_decomposition(max, &max.mult_table(), q).into_iter().map(|pr| (pr.e, pr.f)).collect()
    };
    factors.sort_unstable();
    SplittingType { prime: q, factors }
}

/// A prime ideal of an order, with a multiplier for computing valuations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub e: usize,
    pub f: usize,
    /// Lower Hermite basis in order coordinates.
    pub basis: IMat,
    /// beta with beta P in pO but beta not in pO.
    pub beta: Vec<BigInt>,
}

impl PrimeIdeal {
    pub fn norm(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.f)
    }

    /// v_P(x) for non-zero x in the order.
    pub fn valuation(&self, table: &MultTable, x: &[BigInt]) -> usize {
        assert!(x.iter().any(|c| !c.is_zero()), "valuation of zero");
        let pb = BigInt::from(self.p);
        let mut cur = x.to_vec();
        let mut v = 0;
        loop {
            let y = table.mul(&cur, &self.beta);
            if y.iter().all(|c| (c % &pb).is_zero()) {
                cur = y.into_iter().map(|c| c / &pb).collect();
                v += 1;
            } else {
                return v;
            }
        }
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        intmat::in_lattice(&self.basis, x)
    }
}

/// The prime ideals of a maximal order above q.
pub fn prime_decomposition(order: &OrderBasis, table: &MultTable, q: u64) -> Vec<PrimeIdeal> {
    let d = order.degree();
    let qb = BigInt::from(q);
    let alg = FpAlgebra::new(q, table.reduce(q));
    let mut out: Vec<PrimeIdeal> = alg
        .maximal_ideals()
        .into_iter()
        .map(|m| {
            let mut rows: IMat = (0..d)
                .map(|i| (0..d).map(|j| if i == j { qb.clone() } else { BigInt::zero() }).collect())
                .collect();
            rows.extend(m.basis.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()));
            let basis = intmat::hnf_lower(&rows);
            let beta = find_beta(table, &basis, q);
            let mut pr = PrimeIdeal { p: q, e: 0, f: m.residue_degree, basis, beta };
            pr.e = pr.valuation(table, &table.scalar(&qb));
            pr
        })
        .collect();
    out.sort_by(|a, b| (a.f, a.e, &a.basis).cmp(&(b.f, b.e, &b.basis)));
    out
}

fn find_beta(table: &MultTable, basis: &IMat, q: u64) -> Vec<BigInt> {
    let d = table.degree();
    let m: FqMat = (0..d)
        .map(|k| {
            let mut e = vec![BigInt::zero(); d];
            e[k] = BigInt::one();
            basis.iter().flat_map(|pi| table.mul(&e, pi).iter().map(|c| fq::reduce_big(c, q)).collect::<Vec<_>>()).collect()
        })
        .collect();
    let ker = fq::left_kernel(&m, q);
    let v = ker.into_iter().find(|v| v.iter().any(|&x| x != 0)).expect("prime ideal has a non-trivial inverse");
    v.into_iter().map(BigInt::from).collect()
}

/// Conductor data of a sub-order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConductorData {
    /// [O_F : O]
    #[serde(with = "crate::arith::serde_int::dec")]
    pub conductor_index: BigInt,
    /// [O_F : f]
    #[serde(with = "crate::arith::serde_int::dec")]
    pub conductor_norm: BigInt,
    /// |(O_F/f)^x|
    #[serde(with = "crate::arith::serde_int::dec")]
    pub unit_count_max: BigInt,
    /// |(O/f)^x|
    #[serde(with = "crate::arith::serde_int::dec")]
    pub unit_count_sub: BigInt,
}

impl ConductorData {
    pub fn trivial() -> Self {
        ConductorData {
            conductor_index: BigInt::one(),
            conductor_norm: BigInt::one(),
            unit_count_max: BigInt::one(),
            unit_count_sub: BigInt::one(),
        }
    }

    /// |(O_F/f)^x| / |(O/f)^x|
    pub fn unit_ratio(&self) -> f64 {
        self.unit_count_max.to_f64().unwrap() / self.unit_count_sub.to_f64().unwrap()
    }
}

/// Conductor f = {x in O_F : x O_F in O} as a lower Hermite basis in O_F coordinates.
pub fn conductor(order: &OrderBasis, max: &OrderBasis, max_table: &MultTable) -> IMat {
    let d = max.degree();
    let h = max.relative_matrix(order).expect("order lies in the maximal order");
    let h = intmat::hnf_lower(&h);
    let det = intmat::triangular_det(&h);
    let adj = intmat::adjugate(&h);
    let rows: IMat = (0..d)
        .map(|k| {
            let mut e = vec![BigInt::zero(); d];
            e[k] = BigInt::one();
            (0..d)
                .flat_map(|j| {
                    let mut ej = vec![BigInt::zero(); d];
                    ej[j] = BigInt::one();
                    intmat::vec_mat(&max_table.mul(&e, &ej), &adj)
                })
                .collect()
        })
        .collect();
    intmat::hnf_lower(&intmat::kernel_mod(&rows, &det))
}

/// |R^x| for R = A / J where A is an order with the given table and J an ideal of A
/// (rows in A coordinates) of index n: n * prod over maximal ideals m containing J of
/// (1 - 1/|A/m|).
fn residue_units(table: &MultTable, ideal: &IMat, n: &BigInt) -> BigInt {
    if n.is_one() {
        return BigInt::one();
    }
    let mut num = n.clone();
    let mut den = BigInt::one();
    for (l, _) in primes::factorize(n) {
        let l = l.to_u64().expect("small prime");
        let alg = FpAlgebra::new(l, table.reduce(l));
        let jrows: FqMat = ideal.iter().map(|r| r.iter().map(|x| fq::reduce_big(x, l)).collect()).collect();
        for m in alg.maximal_ideals() {
            let red = Reducer::new(&m.basis, table.degree(), l);
            if jrows.iter().all(|r| red.contains(r)) {
                let size = num_traits::pow(BigInt::from(l), m.residue_degree);
                num *= &size - 1;
                den *= size;
            }
        }
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// Conductor unit counts through residue fields of the primes dividing the conductor.
pub fn residue_unit_counts(order: &OrderBasis, max: &OrderBasis) -> ConductorData {
    let max_table = max.mult_table();
    let rel = intmat::hnf_lower(&max.relative_matrix(order).expect("order lies in the maximal order"));
    let index = intmat::triangular_det(&rel);
    if index.is_one() {
        return ConductorData::trivial();
    }
    let f = conductor(order, max, &max_table);
    let norm = intmat::triangular_det(&f);
    let unit_count_max = residue_units(&max_table, &f, &norm);
    let sub_table = order.mult_table();
    let f_sub: IMat = f
        .iter()
        .map(|r| intmat::solve_lower_integral(&rel, r).expect("conductor lies in the order"))
        .collect();
    let f_sub = intmat::hnf_lower(&f_sub);
    let unit_count_sub = residue_units(&sub_table, &f_sub, &(&norm / &index));
    ConductorData { conductor_index: index, conductor_norm: norm, unit_count_max, unit_count_sub }
}

/// Same counts by listing every residue class; refuses conductors above `cap`.
pub fn residue_unit_counts_bruteforce(order: &OrderBasis, max: &OrderBasis, cap: u64) -> Result<ConductorData, OrderError> {
    let max_table = max.mult_table();
    let rel = intmat::hnf_lower(&max.relative_matrix(order).expect("order lies in the maximal order"));
    let index = intmat::triangular_det(&rel);
    let f = conductor(order, max, &max_table);
    let norm = intmat::triangular_det(&f);
    if norm > BigInt::from(cap) {
        return Err(OrderError::ConductorTooLarge { norm, cap });
    }
    let count = |table: &MultTable, ideal: &IMat| -> BigInt {
        let d = table.degree();
        let mut total = BigInt::zero();
        let sizes: Vec<u64> = (0..d).map(|i| ideal[i][i].to_u64().unwrap()).collect();
        let mut c = vec![0u64; d];
        loop {
            let x: Vec<BigInt> = c.iter().map(|&v| BigInt::from(v)).collect();
            let mut rows = table.mul_matrix(&x);
            rows.extend(ideal.iter().cloned());
            if intmat::triangular_det(&intmat::hnf_lower(&rows)).is_one() {
                total += 1;
            }
            let mut k = 0;
            loop {
                if k == d {
                    return total;
                }
                c[k] += 1;
                if c[k] < sizes[k] {
                    break;
                }
                c[k] = 0;
                k += 1;
            }
        }
    };
    let unit_count_max = count(&max_table, &f);
    let f_sub: IMat = f.iter().map(|r| intmat::solve_lower_integral(&rel, r).unwrap()).collect();
    let unit_count_sub = count(&order.mult_table(), &intmat::hnf_lower(&f_sub));
    Ok(ConductorData { conductor_index: index, conductor_norm: norm, unit_count_max, unit_count_sub })
}

/// An order between Z[theta] and O_F with its conductor data and lambda_S.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderEntry {
    pub order: OrderBasis,
    pub conductor: ConductorData,
    pub lambda_s: u64,
}

/// lambda_S = prod of inertia degrees, or the first decomposed prime of S.
pub fn lambda_s(max: &OrderBasis, s: &BTreeSet<u64>) -> Result<u64, OrderError> {
    let mut lam = 1u64;
    for &q in s {
        let st = splitting_type(max, &max.poly, q);
        match st.inertia_degree() {
            Some(f) => lam *= f as u64,
            None => return Err(OrderError::Decomposed(q)),
        }
    }
    Ok(lam)
}

/// All orders Z[theta] in O in O_F with [O_F : O] prime to every q in S.
pub fn orders_between(p: &MonicIntPolynomial, s: &BTreeSet<u64>, index_cap: u64) -> Result<Vec<OrderEntry>, OrderError> {
    let max = maximal_order(p);
    orders_between_with(&max, s, index_cap)
}

pub fn orders_between_with(max: &MaximalOrder, s: &BTreeSet<u64>, index_cap: u64) -> Result<Vec<OrderEntry>, OrderError> {
    let lam = lambda_s(&max.basis, s)?;
    if max.index > BigInt::from(index_cap) {
        return Err(OrderError::IndexCapExceeded { index: max.index.clone(), cap: index_cap });
    }
    let lattices = intermediate_lattices(&max.basis, s);
    Ok(lattices
        .into_iter()
        .map(|rows| {
            let order = max.basis.sublattice(&rows);
            let conductor = residue_unit_counts(&order, &max.basis);
            OrderEntry { order, conductor, lambda_s: lam }
        })
        .collect())
}

/// Ring lattices between Z[theta] and O_F (O_F coordinates) whose index avoids S; the
/// maximal order comes first.
pub fn intermediate_lattices(max: &OrderBasis, s: &BTreeSet<u64>) -> Vec<IMat> {
    let d = max.degree();
    let table = max.mult_table();
    let lambda0: IMat = (0..d).map(|k| max.theta_power(k)).collect();
    let n = max.index();
    let mut per_prime: Vec<(BigInt, Vec<IMat>)> = Vec::new();
    for (l, v) in primes::factorize(&n) {
        let l = l.to_u64().unwrap();
        let nl = num_traits::pow(BigInt::from(l), v);
        let ml = &n / &nl;
        if s.contains(&l) {
            // maximal at l
            per_prime.push((ml, vec![intmat::identity(d)]));
            continue;
        }
        let mut rows = lambda0.clone();
        rows.extend((0..d).map(|i| (0..d).map(|j| if i == j { nl.clone() } else { BigInt::zero() }).collect()));
        let base = intmat::hnf_lower(&rows);
        let lats: Vec<IMat> = lattices_over(&base, l).into_iter().filter(|m| is_ring_lattice(&table, m)).collect();
        per_prime.push((ml, lats));
    }
    let mut out: Vec<IMat> = vec![intmat::identity(d)];
    let mut combos: Vec<Vec<Vec<BigInt>>> = vec![lambda0.clone()];
    for (ml, lats) in &per_prime {
        let mut next = Vec::new();
        for rows in &combos {
            for m in lats {
                let mut r = rows.clone();
                r.extend(m.iter().map(|row| row.iter().map(|x| x * ml).collect::<Vec<_>>()));
                next.push(r);
            }
        }
        combos = next;
    }
    if per_prime.is_empty() {
        return out;
    }
    let mut seen: BTreeSet<IMat> = BTreeSet::new();
    seen.insert(intmat::identity(d));
    for rows in combos {
        let h = intmat::hnf_lower(&rows);
        debug_assert!(is_ring_lattice(&table, &h));
        if seen.insert(h.clone()) {
            out.push(h);
        }
    }
    out
}

fn is_ring_lattice(table: &MultTable, h: &IMat) -> bool {
    let d = h.len();
    for i in 0..d {
        for j in i..d {
            if !intmat::in_lattice(h, &table.mul(&h[i], &h[j])) {
                return false;
            }
        }
    }
    true
}

/// All lattices between `base` and Z^d, where Z^d / base is an l-group.
fn lattices_over(base: &IMat, l: u64) -> Vec<IMat> {
    let (diag, w) = intmat::smith_generators(base);
    let gens: Vec<(u32, Vec<BigInt>)> = diag
        .iter()
        .zip(w.iter())
        .filter(|(dv, _)| !dv.is_one())
        .map(|(dv, row)| (primes::valuation(dv, l) as u32, row.clone()))
        .collect();
    let r = gens.len();
    let lb = BigInt::from(l);
    let mut out = Vec::new();
    let mut h: IMat = vec![vec![BigInt::zero(); r]; r];
    enumerate_hnf(0, &gens, &lb, &mut h, &mut |h: &IMat| {
        // the subgroup must contain l^k_i e_i
        for (i, (k, _)) in gens.iter().enumerate() {
            let mut v = vec![BigInt::zero(); r];
            v[i] = num_traits::pow(lb.clone(), *k as usize);
            if !intmat::in_lattice(h, &v) {
                return;
            }
        }
        let mut rows = base.clone();
        for row in h.iter() {
            let mut v = vec![BigInt::zero(); base.len()];
            for (c, (_, g)) in row.iter().zip(&gens) {
                for (x, y) in v.iter_mut().zip(g) {
                    *x += c * y;
                }
            }
            rows.push(v);
        }
        out.push(intmat::hnf_lower(&rows));
    });
    out
}

fn enumerate_hnf(i: usize, gens: &[(u32, Vec<BigInt>)], l: &BigInt, h: &mut IMat, visit: &mut dyn FnMut(&IMat)) {
    let r = gens.len();
    if i == r {
        visit(h);
        return;
    }
    for a in 0..=gens[i].0 {
        h[i][i] = num_traits::pow(l.clone(), a as usize);
        // off-diagonal entries h[i][j] in [0, h[j][j])
        let bounds: Vec<BigInt> = (0..i).map(|j| h[j][j].clone()).collect();
        let mut c = vec![BigInt::zero(); i];
        loop {
            for j in 0..i {
                h[i][j] = c[j].clone();
            }
            enumerate_hnf(i + 1, gens, l, h, visit);
            let mut k = 0;
            loop {
                if k == i {
                    break;
                }
                c[k] += 1;
                if c[k] < bounds[k] {
                    break;
                }
                c[k] = BigInt::zero();
                k += 1;
            }
            if k == i {
                break;
            }
        }
    }
    for j in 0..r {
        h[i][j] = BigInt::zero();
    }
}

/// Stickelberger: a field discriminant is 0 or 1 mod 4.
pub fn stickelberger_ok(disc: &BigInt) -> bool {
    let m = disc.mod_floor(&BigInt::from(4));
    m.is_zero() || m.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> MonicIntPolynomial {
        MonicIntPolynomial::from_i64(c)
    }

    #[test]
    fn maximal_orders() {
        let m = maximal_order(&poly(&[-1, -1, 0]));
        assert_eq!(m.index, BigInt::one());
        assert_eq!(m.field_discriminant, BigInt::from(-23));
        let m = maximal_order(&poly(&[-1, -3, 0]));
        assert_eq!(m.field_discriminant, BigInt::from(81));
        let m = maximal_order(&poly(&[8, -2, 1]));
        assert_eq!(m.index, BigInt::from(2));
        assert_eq!(m.field_discriminant, BigInt::from(-503));
        assert!(m.basis.is_ring());
    }

    #[test]
    fn dedekind() {
        assert!(dedekind_p_maximal(&poly(&[-1, -1, 0]), 2));
        assert!(dedekind_p_maximal(&poly(&[-1, -3, 0]), 2));
        assert!(dedekind_p_maximal(&poly(&[-1, -1, 0, 0, 0]), 7));
        assert!(!dedekind_p_maximal(&poly(&[8, -2, 1]), 2));
        // x^3 - 3x - 1 at 3: disc 81 but Z[theta] is already maximal
        assert!(dedekind_p_maximal(&poly(&[-1, -3, 0]), 3));
    }

    #[test]
    fn splitting_in_disc_23_field() {
        let p = poly(&[-1, -1, 0]);
        let m = maximal_order(&p);
        assert_eq!(splitting_type(&m.basis, &p, 2).factors, vec![(1, 3)]);
        assert_eq!(splitting_type(&m.basis, &p, 3).factors, vec![(1, 3)]);
        assert_eq!(splitting_type(&m.basis, &p, 23).factors, vec![(1, 1), (2, 1)]);
    }

    #[test]
    fn splitting_at_index_divisor() {
        // 2 splits completely in the disc -503 field although it divides the index
        let p = poly(&[8, -2, 1]);
        let m = maximal_order(&p);
        let st = splitting_type(&m.basis, &p, 2);
        assert_eq!(st.factors.iter().map(|(e, f)| e * f).sum::<usize>(), 3);
        assert_eq!(st.factors, vec![(1, 1), (1, 1), (1, 1)]);
    }

    #[test]
    fn orders_between_examples() {
        let s: BTreeSet<u64> = [2, 3].into_iter().collect();
        let v = orders_between(&poly(&[-1, -1, 0]), &s, DEFAULT_INDEX_CAP).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].lambda_s, 9);
        // x^3 + x^2 - 2x + 8 with S = {3}: the index-2 order and O_F
        let s3: BTreeSet<u64> = [3].into_iter().collect();
        let v = orders_between(&poly(&[8, -2, 1]), &s3, DEFAULT_INDEX_CAP).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|e| e.order.is_ring()));
        assert_eq!(v[1].order, OrderBasis::equation_order(&poly(&[8, -2, 1])));
    }

    #[test]
    fn inert_conductor_counts() {
        // Z + 3 O_F in the disc -23 field: 3 is inert, f = 3 O_F, (O_F/f)^x has 26 elements
        let p = poly(&[-1, -1, 0]);
        let max = maximal_order(&p).basis;
        let rows: IMat = vec![
            vec![BigInt::from(1), BigInt::zero(), BigInt::zero()],
            vec![BigInt::zero(), BigInt::from(3), BigInt::zero()],
            vec![BigInt::zero(), BigInt::zero(), BigInt::from(3)],
        ];
        let order = max.sublattice(&rows);
        assert!(order.is_ring());
        let c = residue_unit_counts(&order, &max);
        assert_eq!(c.conductor_index, BigInt::from(9));
        assert_eq!(c.unit_count_max, BigInt::from(26));
        assert_eq!(c.unit_count_sub, BigInt::from(2));
        assert_eq!(residue_unit_counts_bruteforce(&order, &max, 1000).unwrap(), c);
    }
}

//! Irreducibility over Z: rational-root test for cubics, Zassenhaus (factor mod q,
//! Hensel lift, recombine) for other prime degrees.

use super::poly::{discriminant, MonicIntPolynomial};
use crate::arith::fq::{self, FpPoly};
use crate::arith::primes;
use crate::arith::zpoly::{self, ZPoly};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

pub fn is_irreducible(p: &MonicIntPolynomial) -> bool {
    let d = p.degree();
    if d == 1 {
        return true;
    }
    if p.constant_term().is_zero() {
        return false;
    }
    if d == 3 {
        return !has_integer_root(p);
    }
    if discriminant(p).is_zero() {
        return false;
    }
    factor_squarefree(&p.full()).len() == 1
}

/// Monic polynomials have only integer rational roots, each dividing c_0.
fn has_integer_root(p: &MonicIntPolynomial) -> bool {
    let c0 = p.constant_term();
    let fac = primes::factorize(c0);
    let mut divisors = vec![BigUint::one()];
    for (q, e) in fac {
        let mut next = Vec::with_capacity(divisors.len() * (e + 1));
        for dv in &divisors {
            let mut m = dv.clone();
            for _ in 0..=e {
                next.push(m.clone());
                m *= &q;
            }
        }
        divisors = next;
    }
    divisors.iter().any(|dv| {
        let x = BigInt::from(dv.clone());
        p.eval(&x).is_zero() || p.eval(&-x).is_zero()
    })
}

fn to_fp(f: &ZPoly, q: u64) -> FpPoly {
    let mut v: FpPoly = f.iter().map(|c| fq::reduce_big(c, q)).collect();
    fq::ptrim(&mut v);
    v
}

fn from_fp(f: &FpPoly) -> ZPoly {
    let mut v: ZPoly = f.iter().map(|&c| BigInt::from(c)).collect();
    if v.is_empty() {
        v.push(BigInt::zero());
    }
    v
}

fn symmetric_mod(f: &ZPoly, m: &BigInt) -> ZPoly {
    let half = m >> 1;
    f.iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect()
}

fn add_scaled(a: &ZPoly, b: &FpPoly, scale: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] += scale * BigInt::from(c);
    }
    zpoly::trim(&mut out);
    out
}

/// Lifts f = g h (mod q), all monic, to f = G H (mod q^k).
fn hensel_pair(f: &ZPoly, g: &FpPoly, h: &FpPoly, q: u64, k: u32) -> (ZPoly, ZPoly) {
    let (one, s, t) = fq::pxgcd(g, h, q);
    debug_assert_eq!(one, vec![1]);
    let mut big_g = from_fp(g);
    let mut big_h = from_fp(h);
    let qb = BigInt::from(q);
    let mut m = qb.clone();
    for _ in 1..k {
        let diff = zpoly::sub(f, &zpoly::mul(&big_g, &big_h));
        let e: ZPoly = diff.iter().map(|c| c / &m).collect();
        let e = to_fp(&e, q);
        let dg = fq::prem(&fq::pmul(&t, &e, q), g, q);
        let dh = fq::prem(&fq::pmul(&s, &e, q), h, q);
        big_g = add_scaled(&big_g, &dg, &m);
        big_h = add_scaled(&big_h, &dh, &m);
        m *= &qb;
    }
    (big_g, big_h)
}

/// Factorization of a monic square-free integer polynomial into monic irreducibles.
pub fn factor_squarefree(f: &ZPoly) -> Vec<ZPoly> {
    let deg = zpoly::degree(f);
    if deg <= 1 {
        return vec![f.clone()];
    }
    let disc = zpoly::resultant(f, &zpoly::derivative(f));
    // choose a good prime with few modular factors
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut tried = 0;
    for q in primes::primes_up_to(2000) {
        if (&disc % BigInt::from(q)).is_zero() {
            continue;
        }
        let fac: Vec<FpPoly> = fq::factor(&to_fp(f, q), q).into_iter().map(|(g, _)| g).collect();
        if fac.len() == 1 {
            return vec![f.clone()];
        }
        if best.as_ref().map_or(true, |b| fac.len() < b.1.len()) {
            best = Some((q, fac));
        }
        tried += 1;
        if tried >= 8 {
            break;
        }
    }
    let (q, locals) = best.expect("no good prime below 2000");
    // Mignotte-style bound on factor coefficients
    let norm2: BigInt = f.iter().map(|c| c * c).sum();
    let bound = (BigInt::one() << (deg + 1)) * (num_integer::Roots::sqrt(&norm2) + 1u32);
    let qb = BigInt::from(q);
    let mut k = 1u32;
    let mut modulus = qb.clone();
    while modulus <= bound {
        modulus *= &qb;
        k += 1;
    }
    // sequential lifting
    let mut lifted: Vec<ZPoly> = Vec::new();
    let mut rest = f.clone();
    for (i, g) in locals.iter().enumerate() {
        if i + 1 == locals.len() {
            lifted.push(symmetric_mod(&rest, &modulus));
            break;
        }
        let rest_fp = to_fp(&rest, q);
        let h = fq::pdivrem(&rest_fp, g, q).0;
        let (big_g, big_h) = hensel_pair(&rest, g, &h, q, k);
        lifted.push(symmetric_mod(&big_g, &modulus));
        rest = symmetric_mod(&big_h, &modulus);
    }
    // recombination
    let mut remaining: Vec<ZPoly> = lifted;
    let mut target = f.clone();
    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let n = remaining.len();
        let mut hit = None;
        for subset in subsets(n, size) {
            let mut g: ZPoly = vec![BigInt::one()];
            for &i in &subset {
                g = symmetric_mod(&zpoly::mul(&g, &remaining[i]), &modulus);
            }
            if let Some(qt) = zpoly::exact_div(&target, &g) {
                hit = Some((subset, g, qt));
                break;
            }
        }
        match hit {
            Some((subset, g, qt)) => {
                found.push(g);
                target = qt;
                let mut i = 0;
                remaining.retain(|_| {
                    let keep = !subset.contains(&i);
                    i += 1;
                    keep
                });
            }
            None => size += 1,
        }
    }
    found.push(target);
    found
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Factorization pattern sanity helper used in tests: degrees of the factors.
pub fn factor_degrees(p: &MonicIntPolynomial) -> Vec<usize> {
    let mut v: Vec<usize> = factor_squarefree(&p.full()).iter().map(zpoly::degree).collect();
    v.sort_unstable();
    v
}

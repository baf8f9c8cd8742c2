//! Prime-field arithmetic: scalars, dense polynomials (low degree first) with
//! Cantor-Zassenhaus factorization, and small dense matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[inline]
pub fn mulm(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

#[inline]
pub fn addm(a: u64, b: u64, q: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % q as u128) as u64
}

#[inline]
pub fn subm(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        q - (b - a)
    }
}

pub fn powm(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1 % q;
    a %= q;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a, q);
        }
        a = mulm(a, a, q);
        e >>= 1;
    }
    r
}

pub fn invm(a: u64, q: u64) -> u64 {
    assert!(a % q != 0, "inverse of zero mod {q}");
    powm(a, q - 2, q)
}

/// Reduces a signed big integer into [0, q).
pub fn reduce_big(x: &num_bigint::BigInt, q: u64) -> u64 {
    use num_traits::ToPrimitive;
    let m = num_bigint::BigInt::from(q);
    let r = ((x % &m) + &m) % &m;
    r.to_u64().unwrap()
}

pub type FpPoly = Vec<u64>;

pub fn ptrim(p: &mut FpPoly) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree, with the zero polynomial reported as `None`.
pub fn pdeg(p: &FpPoly) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

pub fn padd(a: &FpPoly, b: &FpPoly, q: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let mut out: FpPoly = (0..n)
        .map(|i| addm(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), q))
        .collect();
    ptrim(&mut out);
    out
}

pub fn psub(a: &FpPoly, b: &FpPoly, q: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let mut out: FpPoly = (0..n)
        .map(|i| subm(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), q))
        .collect();
    ptrim(&mut out);
    out
}

pub fn pmul(a: &FpPoly, b: &FpPoly, q: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addm(out[i + j], mulm(x, y, q), q);
        }
    }
    ptrim(&mut out);
    out
}

pub fn pscale(a: &FpPoly, c: u64, q: u64) -> FpPoly {
    let mut out: FpPoly = a.iter().map(|&x| mulm(x, c, q)).collect();
    ptrim(&mut out);
    out
}

pub fn pmonic(a: &FpPoly, q: u64) -> FpPoly {
    match pdeg(a) {
        None => vec![],
        Some(d) => pscale(a, invm(a[d], q), q),
    }
}

pub fn pdivrem(a: &FpPoly, b: &FpPoly, q: u64) -> (FpPoly, FpPoly) {
    let db = pdeg(b).expect("division by zero polynomial");
    let mut r = a.clone();
    ptrim(&mut r);
    let Some(da) = pdeg(&r) else {
        return (vec![], vec![]);
    };
    if da < db {
        return (vec![], r);
    }
    let inv = invm(b[db], q);
    let mut quo = vec![0u64; da - db + 1];
    for k in (db..=da).rev() {
        let c = mulm(r[k], inv, q);
        if c == 0 {
            continue;
        }
        quo[k - db] = c;
        for i in 0..=db {
            r[k - db + i] = subm(r[k - db + i], mulm(c, b[i], q), q);
        }
    }
    ptrim(&mut r);
    ptrim(&mut quo);
    (quo, r)
}

pub fn prem(a: &FpPoly, b: &FpPoly, q: u64) -> FpPoly {
    pdivrem(a, b, q).1
}

pub fn pgcd(a: &FpPoly, b: &FpPoly, q: u64) -> FpPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    ptrim(&mut x);
    ptrim(&mut y);
    while !y.is_empty() {
        let r = prem(&x, &y, q);
        x = y;
        y = r;
    }
    pmonic(&x, q)
}

/// Extended gcd: returns (g, s, t) with s a + t b = g, g monic.
pub fn pxgcd(a: &FpPoly, b: &FpPoly, q: u64) -> (FpPoly, FpPoly, FpPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    ptrim(&mut r0);
    ptrim(&mut r1);
    let (mut s0, mut s1) = (vec![1u64], vec![]);
    let (mut t0, mut t1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        let (qq, r) = pdivrem(&r0, &r1, q);
        let s = psub(&s0, &pmul(&qq, &s1, q), q);
        let t = psub(&t0, &pmul(&qq, &t1, q), q);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    let d = pdeg(&r0).expect("gcd of zero polynomials");
    let inv = invm(r0[d], q);
    (pscale(&r0, inv, q), pscale(&s0, inv, q), pscale(&t0, inv, q))
}

pub fn pderiv(a: &FpPoly, q: u64) -> FpPoly {
    let mut out: FpPoly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| mulm(c, (i as u64) % q, q))
        .collect();
    ptrim(&mut out);
    out
}

/// `base^e mod m`, with the exponent given as a big integer.
pub fn ppowmod_big(base: &FpPoly, e: &num_bigint::BigUint, m: &FpPoly, q: u64) -> FpPoly {
    let mut result = vec![1u64];
    let b = prem(base, m, q);
    let bits = e.bits();
    for i in (0..bits).rev() {
        result = prem(&pmul(&result, &result, q), m, q);
        if e.bit(i) {
            result = prem(&pmul(&result, &b, q), m, q);
        }
    }
    result
}

pub fn ppowmod(base: &FpPoly, e: u64, m: &FpPoly, q: u64) -> FpPoly {
    ppowmod_big(base, &num_bigint::BigUint::from(e), m, q)
}

/// x^(q^k) mod m by repeated q-th powering.
fn frobenius_power(m: &FpPoly, k: usize, q: u64) -> FpPoly {
    let mut x = vec![0u64, 1];
    for _ in 0..k {
        x = ppowmod(&x, q, m, q);
    }
    x
}

pub fn peval(a: &FpPoly, x: u64, q: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| addm(mulm(acc, x, q), c, q))
}

/// Square-free decomposition of a monic polynomial: list of (factor, multiplicity).
pub fn squarefree(f: &FpPoly, q: u64) -> Vec<(FpPoly, usize)> {
    let f = pmonic(f, q);
    let mut out = Vec::new();
    if pdeg(&f).unwrap_or(0) == 0 {
        return out;
    }
    let d = pderiv(&f, q);
    if d.is_empty() {
        // f = g(x^q)
        let g: FpPoly = f.iter().step_by(q as usize).copied().collect();
        for (h, m) in squarefree(&g, q) {
            out.push((h, m * q as usize));
        }
        return out;
    }
    let mut c = pgcd(&f, &d, q);
    let mut w = pdivrem(&f, &c, q).0;
    let mut i = 1;
    while pdeg(&w).unwrap_or(0) > 0 {
        let y = pgcd(&w, &c, q);
        let z = pdivrem(&w, &y, q).0;
        if pdeg(&z).unwrap_or(0) > 0 {
            out.push((pmonic(&z, q), i));
        }
        i += 1;
        w = y;
        c = pdivrem(&c, &w, q).0;
    }
    if pdeg(&c).unwrap_or(0) > 0 {
        let g: FpPoly = c.iter().step_by(q as usize).copied().collect();
        for (h, m) in squarefree(&g, q) {
            out.push((h, m * q as usize));
        }
    }
    out
}

/// Distinct-degree factorization of a square-free monic polynomial.
pub fn distinct_degree(f: &FpPoly, q: u64) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    let mut rest = pmonic(f, q);
    let mut k = 0;
    let mut xp = vec![0u64, 1];
    while let Some(dr) = pdeg(&rest) {
        if dr == 0 {
            break;
        }
        k += 1;
        if 2 * k > dr {
            out.push((rest.clone(), dr));
            break;
        }
        xp = ppowmod(&xp, q, &rest, q);
        let g = pgcd(&rest, &psub(&xp, &[0, 1].to_vec(), q), q);
        if pdeg(&g).unwrap_or(0) > 0 {
            rest = pdivrem(&rest, &g, q).0;
            xp = prem(&xp, &rest, q);
            out.push((g, k));
        }
    }
    out
}

/// Splits a product of distinct irreducibles of common degree `k`.
pub fn equal_degree(f: &FpPoly, k: usize, q: u64, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let f = pmonic(f, q);
    let n = pdeg(&f).unwrap_or(0);
    if n == k {
        return vec![f];
    }
    loop {
        let a: FpPoly = {
            let mut v: FpPoly = (0..n).map(|_| rng.gen_range(0..q)).collect();
            ptrim(&mut v);
            v
        };
        if pdeg(&a).unwrap_or(0) == 0 {
            continue;
        }
        let b = if q == 2 {
            // absolute trace a + a^2 + ... + a^(2^(k-1))
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..k {
                t = prem(&pmul(&t, &t, q), &f, q);
                acc = padd(&acc, &t, q);
            }
            acc
        } else {
            let e = (num_bigint::BigUint::from(q).pow(k as u32) - 1u32) / 2u32;
            psub(&ppowmod_big(&a, &e, &f, q), &vec![1], q)
        };
        let g = pgcd(&f, &b, q);
        let dg = pdeg(&g).unwrap_or(0);
        if dg > 0 && dg < n {
            let h = pdivrem(&f, &g, q).0;
            let mut out = equal_degree(&g, k, q, rng);
            out.extend(equal_degree(&h, k, q, rng));
            return out;
        }
    }
}

/// Complete factorization of a polynomial into monic irreducibles with multiplicity,
/// sorted by (degree, coefficients).
pub fn factor(f: &FpPoly, q: u64) -> Vec<(FpPoly, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ q);
    let mut out = Vec::new();
    for (sf, m) in squarefree(f, q) {
        for (g, k) in distinct_degree(&sf, q) {
            for h in equal_degree(&g, k, q, &mut rng) {
                out.push((h, m));
            }
        }
    }
    out.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    out
}

/// Roots in F_q of a polynomial, sorted ascending, without multiplicity.
pub fn roots(f: &FpPoly, q: u64) -> Vec<u64> {
    let mut f = pmonic(f, q);
    if f.is_empty() {
        return vec![];
    }
    let xq = frobenius_power(&f, 1, q);
    let g = pgcd(&f, &psub(&xq, &vec![0, 1], q), q);
    f = g;
    if pdeg(&f).unwrap_or(0) == 0 {
        return vec![];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7007 ^ q);
    let mut out: Vec<u64> = equal_degree(&f, 1, q, &mut rng)
        .into_iter()
        .map(|l| subm(0, l[0], q))
        .collect();
    out.sort_unstable();
    out
}

pub fn is_irreducible(f: &FpPoly, q: u64) -> bool {
    let fac = factor(f, q);
    fac.len() == 1 && fac[0].1 == 1
}

/// Dense matrices over F_q as row vectors.
pub type FqMat = Vec<Vec<u64>>;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut FqMat, q: u64) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = invm(m[r][c], q);
        for x in m[r].iter_mut() {
            *x = mulm(*x, inv, q);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    let v = mulm(f, m[r][j], q);
                    m[i][j] = subm(m[i][j], v, q);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &FqMat, q: u64) -> usize {
    let mut a = m.clone();
    rref(&mut a, q).len()
}

/// Basis of {x : M x = 0} for an r x c matrix M.
pub fn kernel(m: &FqMat, cols: usize, q: u64) -> Vec<Vec<u64>> {
    let mut a = m.clone();
    let pivots = rref(&mut a, q);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = subm(0, a[i][f], q);
            }
            v
        })
        .collect()
}

/// Basis of {y : y M = 0}.
pub fn left_kernel(m: &FqMat, q: u64) -> Vec<Vec<u64>> {
    if m.is_empty() {
        return vec![];
    }
    let t = transpose(m);
    kernel(&t, m.len(), q)
}

pub fn transpose(m: &FqMat) -> FqMat {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

/// Row-space basis (non-zero rows of the reduced echelon form).
pub fn row_basis(m: &FqMat, q: u64) -> FqMat {
    let mut a = m.clone();
    let k = rref(&mut a, q).len();
    a.truncate(k);
    a
}

/// Solves x M = v for a row vector x, if consistent.
pub fn solve_left(m: &FqMat, v: &[u64], q: u64) -> Option<Vec<u64>> {
    let rows = m.len();
    let cols = v.len();
    // augmented transpose: M^T x^T = v^T
    let mut a: FqMat = (0..cols)
        .map(|j| {
            let mut row: Vec<u64> = (0..rows).map(|i| m[i][j]).collect();
            row.push(v[j]);
            row
        })
        .collect();
    let pivots = rref(&mut a, q);
    if pivots.contains(&rows) {
        return None;
    }
    let mut x = vec![0u64; rows];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = a[i][rows];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(fac: &[(FpPoly, usize)], q: u64) -> FpPoly {
        let mut acc = vec![1u64];
        for (g, m) in fac {
            for _ in 0..*m {
                acc = pmul(&acc, g, q);
            }
        }
        acc
    }

    #[test]
    fn factor_reassembles() {
        for &q in &[2u64, 3, 5, 7, 23, 101] {
            for seed in 0..20u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let deg = rng.gen_range(1..8);
                let mut f: FpPoly = (0..deg).map(|_| rng.gen_range(0..q)).collect();
                f.push(1);
                let fac = factor(&f, q);
                assert_eq!(expand(&fac, q), f, "q={q} f={f:?}");
                for (g, _) in &fac {
                    let sub = factor(g, q);
                    assert_eq!(sub.len(), 1);
                    assert_eq!(sub[0].1, 1);
                }
            }
        }
    }

    #[test]
    fn cubic_mod_23_splits_as_linear_times_square() {
        // x^3 - x - 1 = (x - 3)(x - 10)^2 mod 23
        let f = vec![22, 22, 0, 1];
        let fac = factor(&f, 23);
        let mut mult: Vec<usize> = fac.iter().map(|x| x.1).collect();
        mult.sort();
        assert_eq!(mult, vec![1, 2]);
    }

    #[test]
    fn kernel_is_annihilated() {
        let q = 7;
        let m: FqMat = vec![vec![1, 2, 3, 4], vec![2, 4, 6, 2], vec![0, 0, 0, 0]];
        let k = kernel(&m, 4, q);
        assert_eq!(k.len(), 2);
        for v in k {
            for row in &m {
                let s = row.iter().zip(&v).fold(0, |a, (x, y)| addm(a, mulm(*x, *y, q), q));
                assert_eq!(s, 0);
            }
        }
    }
}

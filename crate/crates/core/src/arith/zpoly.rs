//! Dense integer polynomials stored low degree first. Used for resultants, exact
//! division and factor recombination; no attempt at asymptotic speed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type ZPoly = Vec<BigInt>;

pub fn trim(p: &mut ZPoly) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &ZPoly) -> usize {
    let mut d = p.len().saturating_sub(1);
    while d > 0 && p[d].is_zero() {
        d -= 1;
    }
    d
}

pub fn is_zero(p: &ZPoly) -> bool {
    p.iter().all(|c| c.is_zero())
}

pub fn mul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![BigInt::zero()];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub fn sub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

pub fn derivative(a: &ZPoly) -> ZPoly {
    if a.len() <= 1 {
        return vec![BigInt::zero()];
    }
    let mut out: ZPoly = a.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    trim(&mut out);
    out
}

pub fn eval(a: &ZPoly, x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in a.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Division by a monic polynomial: returns (quotient, remainder).
pub fn divrem_monic(a: &ZPoly, m: &ZPoly) -> (ZPoly, ZPoly) {
    let dm = degree(m);
    assert!(m[dm].is_one(), "divisor must be monic");
    let mut r = a.clone();
    trim(&mut r);
    if degree(&r) < dm || is_zero(&r) {
        return (vec![BigInt::zero()], r);
    }
    let mut q = vec![BigInt::zero(); degree(&r) - dm + 1];
    for k in (dm..=degree(&r)).rev() {
        let c = r[k].clone();
        if c.is_zero() {
            continue;
        }
        q[k - dm] = c.clone();
        for (i, mc) in m.iter().enumerate().take(dm + 1) {
            r[k - dm + i] -= &c * mc;
        }
    }
    r.truncate(dm.max(1));
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

/// Exact division test over Z for a monic or primitive divisor; returns the quotient
/// when `b` divides `a` in Z[x].
pub fn exact_div(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let db = degree(b);
    let lead = b[db].clone();
    let mut r = a.clone();
    trim(&mut r);
    let da = degree(&r);
    if da < db {
        return if is_zero(&r) { Some(vec![BigInt::zero()]) } else { None };
    }
    let mut q = vec![BigInt::zero(); da - db + 1];
    for k in (db..=da).rev() {
        if r[k].is_zero() {
            continue;
        }
        let (c, rem) = r[k].div_rem(&lead);
        if !rem.is_zero() {
            return None;
        }
        for i in 0..=db {
            r[k - db + i] -= &c * &b[i];
        }
        q[k - db] = c;
    }
    if r.iter().all(|c| c.is_zero()) {
        trim(&mut q);
        Some(q)
    } else {
        None
    }
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn det_bareiss(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Resultant via the Sylvester determinant.
pub fn resultant(a: &ZPoly, b: &ZPoly) -> BigInt {
    let m = degree(a);
    let n = degree(b);
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut s = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for j in 0..=m {
            s[i][i + j] = a[m - j].clone();
        }
    }
    for i in 0..m {
        for j in 0..=n {
            s[n + i][i + j] = b[n - j].clone();
        }
    }
    det_bareiss(&s)
}

pub fn content(a: &ZPoly) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Largest absolute coefficient.
pub fn height(a: &ZPoly) -> BigInt {
    a.iter().map(|c| c.abs()).max().unwrap_or_default()
}

pub fn from_i64(c: &[i64]) -> ZPoly {
    c.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_round_trip() {
        let a = from_i64(&[1, 0, -3, 2, 5]);
        let m = from_i64(&[-1, 2, 1]);
        let (q, r) = divrem_monic(&a, &m);
        let back = {
            let mut t = mul(&q, &m);
            let n = t.len().max(r.len());
            t.resize(n, BigInt::zero());
            for (i, c) in r.iter().enumerate() {
                t[i] += c;
            }
            trim(&mut t);
            t
        };
        assert_eq!(back, a);
    }

    #[test]
    fn resultant_matches_product_of_roots() {
        // Res(x-2, x^2+1) = 2^2+1
        assert_eq!(resultant(&from_i64(&[-2, 1]), &from_i64(&[1, 0, 1])), BigInt::from(5));
    }

    #[test]
    fn bareiss_det() {
        let m = vec![from_i64(&[2, 0, 1]), from_i64(&[1, 3, 2]), from_i64(&[1, 1, 2])];
        assert_eq!(det_bareiss(&m), BigInt::from(6));
    }
}

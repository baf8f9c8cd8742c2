//! Integer structure constants of an order and element arithmetic in its coordinates.

use crate::arith::intmat::{self, IMat};
use crate::arith::zpoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// `t[i][j]` holds the coordinates of e_i e_j. The first basis element is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultTable {
    pub t: Vec<Vec<Vec<BigInt>>>,
}

impl MultTable {
    pub fn degree(&self) -> usize {
        self.t.len()
    }

    pub fn one(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.degree()];
        v[0] = BigInt::one();
        v
    }

    pub fn scalar(&self, c: &BigInt) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.degree()];
        v[0] = c.clone();
        v
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let d = self.degree();
        let mut out = vec![BigInt::zero(); d];
        for i in 0..d {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if b[j].is_zero() {
                    continue;
                }
                let c = &a[i] * &b[j];
                for (o, t) in out.iter_mut().zip(&self.t[i][j]) {
                    if !t.is_zero() {
                        *o += &c * t;
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &[BigInt], mut e: u64) -> Vec<BigInt> {
        let mut base = a.to_vec();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Rows are the coordinates of a e_j, so coords(a x) = coords(x) * M.
    pub fn mul_matrix(&self, a: &[BigInt]) -> IMat {
        let d = self.degree();
        (0..d)
            .map(|j| {
                let mut e = vec![BigInt::zero(); d];
                e[j] = BigInt::one();
                self.mul(a, &e)
            })
            .collect()
    }

    pub fn norm(&self, a: &[BigInt]) -> BigInt {
        zpoly::det_bareiss(&self.mul_matrix(a))
    }

    pub fn trace(&self, a: &[BigInt]) -> BigInt {
        let m = self.mul_matrix(a);
        (0..m.len()).map(|i| m[i][i].clone()).sum()
    }

    /// Characteristic polynomial of multiplication by a, low degree first, monic.
    pub fn charpoly(&self, a: &[BigInt]) -> Vec<BigInt> {
        let m = self.mul_matrix(a);
        let n = m.len();
        // Faddeev-LeVerrier; all divisions are exact
        let mut c = vec![BigInt::zero(); n + 1];
        c[n] = BigInt::one();
        let mut mk: IMat = vec![vec![BigInt::zero(); n]; n];
        for k in 1..=n {
            let mut next = intmat::mat_mul(&m, &mk);
            for i in 0..n {
                next[i][i] += &c[n - k + 1];
            }
            mk = next;
            let am = intmat::mat_mul(&m, &mk);
            let tr: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
            c[n - k] = -(tr / BigInt::from(k as u64));
        }
        c
    }

    /// Exact quotient a / b when it lies in the order.
    pub fn div(&self, a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
        let m = self.mul_matrix(b);
        let det = zpoly::det_bareiss(&m);
        if det.is_zero() {
            return None;
        }
        let adj = intmat::adjugate(&m);
        let num = intmat::vec_mat(a, &adj);
        let mut out = Vec::with_capacity(num.len());
        for x in num {
            let (q, r) = x.div_rem(&det);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(out)
    }

    /// Inverse of a unit.
    pub fn inverse_unit(&self, a: &[BigInt]) -> Option<Vec<BigInt>> {
        self.div(&self.one(), a)
    }

    /// Signed integer power, for units.
    pub fn pow_signed(&self, a: &[BigInt], e: i64) -> Option<Vec<BigInt>> {
        if e >= 0 {
            Some(self.pow(a, e as u64))
        } else {
            Some(self.pow(&self.inverse_unit(a)?, e.unsigned_abs()))
        }
    }

    /// Structure constants reduced mod q.
    pub fn reduce(&self, q: u64) -> Vec<Vec<Vec<u64>>> {
        self.t
            .iter()
            .map(|row| row.iter().map(|v| v.iter().map(|x| crate::arith::fq::reduce_big(x, q)).collect()).collect())
            .collect()
    }

    /// Lattice x*O + rows as lower HNF, where rows already lie in the order.
    pub fn principal_lattice(&self, a: &[BigInt]) -> IMat {
        intmat::hnf_lower(&self.mul_matrix(a))
    }

    /// Product of two lattices (lists of generators) inside the order.
    pub fn lattice_product(&self, a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IMat {
        let mut rows = Vec::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                rows.push(self.mul(x, y));
            }
        }
        intmat::hnf_lower(&rows)
    }
}

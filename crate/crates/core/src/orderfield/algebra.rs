//! Finite commutative algebras O/qO over F_q: radical, and the maximal ideals with their
//! residue degrees.

use crate::arith::fq::{self, FqMat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct FpAlgebra {
    pub q: u64,
    /// t[i][j] = coordinates of e_i e_j; e_0 is the identity.
    pub t: Vec<Vec<Vec<u64>>>,
}

/// A maximal ideal of the algebra, as a subspace (reduced row basis), with residue degree.
#[derive(Clone, Debug)]
pub struct MaxIdeal {
    pub basis: FqMat,
    pub residue_degree: usize,
}

impl FpAlgebra {
    pub fn new(q: u64, t: Vec<Vec<Vec<u64>>>) -> Self {
        FpAlgebra { q, t }
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    fn unit_vec(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.dim()];
        v[i] = 1;
        v
    }

    pub fn one(&self) -> Vec<u64> {
        self.unit_vec(0)
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = self.dim();
        let q = self.q;
        let mut out = vec![0u64; n];
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0 {
                    continue;
                }
                let c = fq::mulm(a[i], b[j], q);
                for k in 0..n {
                    let t = self.t[i][j][k];
                    if t != 0 {
                        out[k] = fq::addm(out[k], fq::mulm(c, t, q), q);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> Vec<u64> {
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

    fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| fq::subm(x, y, self.q)).collect()
    }

    fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        a.iter().map(|&x| fq::mulm(x, c, self.q)).collect()
    }

    /// Rows are images of the basis under x -> x^q.
    fn frobenius(&self) -> FqMat {
        (0..self.dim()).map(|i| self.pow(&self.unit_vec(i), self.q)).collect()
    }

    /// Nilradical: kernel of x -> x^(q^k) with q^k >= dim.
    pub fn radical(&self) -> FqMat {
        let n = self.dim();
        let f = self.frobenius();
        let mut m = f.clone();
        let mut reach = self.q;
        while (reach as usize) < n {
            m = mat_mul(&m, &f, self.q);
            reach = reach.saturating_mul(self.q);
        }
        let k = fq::left_kernel(&m, self.q);
        fq::row_basis(&k, self.q)
    }

    /// Maximal ideals (all of them contain the radical).
    pub fn maximal_ideals(&self) -> Vec<MaxIdeal> {
        let n = self.dim();
        let q = self.q;
        let rad = self.radical();
        let reducer = Reducer::new(&rad, n, q);
        // B = {x : x^q - x in rad}, isomorphic to rad + F_q^g
        let frob = self.frobenius();
        let g_rows: FqMat = (0..n)
            .map(|i| reducer.reduce(&self.sub(&frob[i], &self.unit_vec(i))))
            .collect();
        let b_space = fq::row_basis(&fq::left_kernel(&g_rows, q), q);
        let g = b_space.len() - rad.len();
        let mut idems: Vec<Vec<u64>> = vec![self.one()];
        let mut rng = ChaCha8Rng::seed_from_u64(q ^ 0x5eed);
        let mut guard = 0;
        while idems.len() < g {
            guard += 1;
            assert!(guard < 10_000, "idempotent splitting did not converge");
            let mut a = vec![0u64; n];
            for row in &b_space {
                let c = rng.gen_range(0..q);
                for (x, y) in a.iter_mut().zip(row) {
                    *x = fq::addm(*x, fq::mulm(c, *y, q), q);
                }
            }
            let values = self.eigenvalues(&a, &reducer);
            let mut next = Vec::new();
            for e in &idems {
                let mut parts = Vec::new();
                for &c in &values {
                    // indicator of the components of e on which a takes the value c
                    let shifted = self.sub(&a, &self.scale(&self.one(), c));
                    let nz = self.pow(&shifted, q - 1);
                    let part = self.mul(e, &self.sub(&self.one(), &nz));
                    if reducer.reduce(&part).iter().any(|&x| x != 0) {
                        parts.push(part);
                    }
                }
                if parts.is_empty() {
                    next.push(e.clone());
                } else {
                    next.extend(parts);
                }
            }
            idems = next;
        }
        idems
            .iter()
            .map(|e| {
                let rows: FqMat = (0..n).map(|i| reducer.reduce(&self.mul(e, &self.unit_vec(i)))).collect();
                let f = fq::rank(&rows, q);
                let basis = fq::row_basis(&fq::left_kernel(&rows, q), q);
                MaxIdeal { basis, residue_degree: f }
            })
            .collect()
    }

    /// Distinct roots of the minimal polynomial of a modulo the radical.
    fn eigenvalues(&self, a: &[u64], reducer: &Reducer) -> Vec<u64> {
        let q = self.q;
        let mut powers: FqMat = vec![reducer.reduce(&self.one())];
        let mut cur = self.one();
        loop {
            cur = self.mul(&cur, a);
            let v = reducer.reduce(&cur);
            if let Some(x) = fq::solve_left(&powers, &v, q) {
                // a^k = sum x_i a^i, minimal polynomial t^k - sum x_i t^i
                let mut poly: Vec<u64> = x.iter().map(|&c| fq::subm(0, c, q)).collect();
                poly.push(1);
                return fq::roots(&poly, q);
            }
            powers.push(v);
        }
    }
}

fn mat_mul(a: &FqMat, b: &FqMat, q: u64) -> FqMat {
    let m = b[0].len();
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| row.iter().zip(b).fold(0, |acc, (x, br)| fq::addm(acc, fq::mulm(*x, br[j], q), q)))
                .collect()
        })
        .collect()
}

/// Canonical representatives modulo a subspace.
pub struct Reducer {
    rows: FqMat,
    pivots: Vec<usize>,
    q: u64,
}

impl Reducer {
    pub fn new(space: &FqMat, n: usize, q: u64) -> Self {
        let mut rows = space.clone();
        if rows.is_empty() {
            return Reducer { rows, pivots: vec![], q };
        }
        let pivots = fq::rref(&mut rows, q);
        rows.truncate(pivots.len());
        debug_assert!(rows.iter().all(|r| r.len() == n));
        Reducer { rows, pivots, q }
    }

    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = out[p];
            if c != 0 {
                for (o, r) in out.iter_mut().zip(row) {
                    *o = fq::subm(*o, fq::mulm(c, *r, self.q), self.q);
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }
}

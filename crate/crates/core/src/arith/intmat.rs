//! Integer lattices given by generating rows: Hermite and Smith normal forms,
//! kernels modulo n, triangular solves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IMat = Vec<Vec<BigInt>>;

fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Row-style Hermite form with pivots moving left to right: each basis row's first
/// non-zero entry is positive, lies strictly right of the previous row's, and entries
/// above a pivot are reduced into [0, pivot). Zero rows are dropped.
pub fn hnf_upper(rows: &[Vec<BigInt>]) -> IMat {
    let mut a: IMat = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    if a.is_empty() {
        return a;
    }
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        // gather the gcd of column c into row r
        for i in r + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            if a[r][c].is_zero() {
                a.swap(r, i);
                continue;
            }
            let (g, x, y) = xgcd(&a[r][c], &a[i][c]);
            let u = &a[r][c] / &g;
            let v = &a[i][c] / &g;
            for j in c..cols {
                let top = &x * &a[r][j] + &y * &a[i][j];
                let bot = &u * &a[i][j] - &v * &a[r][j];
                a[r][j] = top;
                a[i][j] = bot;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for j in c..cols {
                a[r][j] = -&a[r][j];
            }
        }
        for i in 0..r {
            let f = a[i][c].div_floor(&a[r][c]);
            if !f.is_zero() {
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a.retain(|row| row.iter().any(|x| !x.is_zero()));
    a
}

/// Lower-triangular Hermite basis of a full-rank lattice in Z^n: row i has its last
/// non-zero entry (the positive pivot) in column i, and entries left of each pivot
/// column are reduced modulo that pivot.
pub fn hnf_lower(rows: &[Vec<BigInt>]) -> IMat {
    let rev: IMat = rows.iter().map(|r| r.iter().rev().cloned().collect()).collect();
    let h = hnf_upper(&rev);
    let mut out: IMat = h.into_iter().map(|r| r.into_iter().rev().collect()).collect();
    out.reverse();
    out
}

/// Basis of {a in Z^k : a M = 0 mod n} for a k x m integer matrix M.
pub fn kernel_mod(m: &[Vec<BigInt>], n: &BigInt) -> IMat {
    let k = m.len();
    if k == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut rows: IMat = Vec::with_capacity(k + cols);
    for (i, row) in m.iter().enumerate() {
        let mut r: Vec<BigInt> = row.iter().map(|x| x.mod_floor(n)).collect();
        r.extend((0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
        rows.push(r);
    }
    for j in 0..cols {
        let mut r = vec![BigInt::zero(); cols + k];
        r[j] = n.clone();
        rows.push(r);
    }
    let h = hnf_upper(&rows);
    h.into_iter()
        .filter(|r| r[..cols].iter().all(|x| x.is_zero()))
        .map(|r| r[cols..].to_vec())
        .collect()
}

/// Determinant of a lower- or upper-triangular matrix.
pub fn triangular_det(h: &[Vec<BigInt>]) -> BigInt {
    (0..h.len()).fold(BigInt::one(), |acc, i| acc * &h[i][i])
}

/// Solves x H = v for lower-triangular H with non-zero diagonal; returns the integer
/// solution if it exists.
pub fn solve_lower_integral(h: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = h.len();
    let mut rest = v.to_vec();
    let mut x = vec![BigInt::zero(); n];
    for i in (0..n).rev() {
        let (q, r) = rest[i].div_rem(&h[i][i]);
        if !r.is_zero() {
            return None;
        }
        for j in 0..=i {
            let t = &q * &h[i][j];
            rest[j] -= t;
        }
        x[i] = q;
    }
    Some(x)
}

/// Reduces v modulo the rows of a lower-triangular basis so that each entry lies in
/// [0, h_ii). Returns the reduced vector.
pub fn reduce_lower(h: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    let mut out = v.to_vec();
    for i in (0..h.len()).rev() {
        let q = out[i].div_floor(&h[i][i]);
        if !q.is_zero() {
            for j in 0..=i {
                let t = &q * &h[i][j];
                out[j] -= t;
            }
        }
    }
    out
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IMat {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| row.iter().zip(b.iter()).fold(BigInt::zero(), |acc, (x, br)| acc + x * &br[j]))
                .collect()
        })
        .collect()
}

pub fn vec_mat(v: &[BigInt], b: &[Vec<BigInt>]) -> Vec<BigInt> {
    let m = b.first().map_or(0, |r| r.len());
    (0..m)
        .map(|j| v.iter().zip(b.iter()).fold(BigInt::zero(), |acc, (x, br)| acc + x * &br[j]))
        .collect()
}

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Smith form of a square non-singular matrix A, whose rows span a lattice L in Z^n.
/// Returns the elementary divisors d_1 | d_2 | ... and a unimodular W such that the
/// classes of the rows of W generate the cyclic factors of Z^n / L: row i of W has
/// order d_i.
pub fn smith_generators(a: &[Vec<BigInt>]) -> (Vec<BigInt>, IMat) {
    let n = a.len();
    let mut m: IMat = a.to_vec();
    // W = V^{-1}, updated by inverse column operations
    let mut w = identity(n);
    for t in 0..n {
        loop {
            // smallest non-zero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !m[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            m.swap(t, pi);
            if pj != t {
                for row in m.iter_mut() {
                    row.swap(t, pj);
                }
                w.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..n {
                let q = m[i][t].div_floor(&m[t][t]);
                if !q.is_zero() {
                    for j in t..n {
                        let v = &q * &m[t][j];
                        m[i][j] -= v;
                    }
                }
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = m[t][j].div_floor(&m[t][t]);
                if !q.is_zero() {
                    // column j -= q column t ; inverse: row t of W += q row j
                    for i in t..n {
                        let v = &q * &m[i][t];
                        m[i][j] -= v;
                    }
                    let add: Vec<BigInt> = w[j].iter().map(|x| x * &q).collect();
                    for (x, y) in w[t].iter_mut().zip(add) {
                        *x += y;
                    }
                }
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let mut bad = None;
            'outer: for i in t + 1..n {
                for j in t + 1..n {
                    if !(&m[i][j] % &m[t][t]).is_zero() {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in t..n {
                        let v = m[i][j].clone();
                        m[t][j] += v;
                    }
                }
                None => break,
            }
        }
        if m[t][t].is_negative() {
            for row in m.iter_mut() {
                row[t] = -&row[t];
            }
            for x in w[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    let diag = (0..n).map(|i| m[i][i].clone()).collect();
    (diag, w)
}

/// Adjugate matrix: adj(A) A = A adj(A) = det(A) I.
pub fn adjugate(a: &[Vec<BigInt>]) -> IMat {
    let n = a.len();
    if n == 1 {
        return vec![vec![BigInt::one()]];
    }
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: IMat = a
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let m = crate::arith::zpoly::det_bareiss(&minor);
            out[j][i] = if (i + j) % 2 == 0 { m } else { -m };
        }
    }
    out
}

/// Membership of v in the row lattice of a lower-triangular basis.
pub fn in_lattice(h: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    solve_lower_integral(h, v).is_some()
}

pub fn from_i64(rows: &[&[i64]]) -> IMat {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

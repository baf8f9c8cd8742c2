//! LLL reduction and Fincke-Pohst enumeration for lattices whose vectors are integer
//! coordinate rows together with an accurate real embedding supplied by the caller.
//! Real images are recomputed from exact coordinates after every update, so rounding
//! never accumulates across reduction steps.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Gso {
    mu: Vec<Vec<f64>>,
    norms: Vec<f64>,
}

fn gso(real: &[Vec<f64>]) -> Gso {
    let n = real.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut norms = vec![0.0; n];
    for i in 0..n {
        let mut v = real[i].clone();
        for j in 0..i {
            mu[i][j] = if norms[j] > 0.0 { dot(&real[i], &star[j]) / norms[j] } else { 0.0 };
            for (x, s) in v.iter_mut().zip(&star[j]) {
                *x -= mu[i][j] * s;
            }
        }
        norms[i] = dot(&v, &v);
        star.push(v);
    }
    Gso { mu, norms }
}

/// LLL-reduces the lattice spanned by `coords` (rows, integer coordinates in some fixed
/// basis) under the quadratic form x -> |embed(x)|^2. Returns reduced coordinates.
pub fn lll<F>(mut coords: Vec<Vec<BigInt>>, embed: F, delta: f64) -> Vec<Vec<BigInt>>
where
    F: Fn(&[BigInt]) -> Vec<f64>,
{
    let n = coords.len();
    if n <= 1 {
        return coords;
    }
    let mut real: Vec<Vec<f64>> = coords.iter().map(|c| embed(c)).collect();
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 100_000 {
            log::warn!("lll: iteration guard hit in dimension {n}");
            break;
        }
        let mut g = gso(&real);
        for j in (0..k).rev() {
            let m = g.mu[k][j];
            if m.abs() > 0.5 {
                let r = m.round();
                let rb = BigInt::from(r as i128);
                let sub: Vec<BigInt> = coords[j].iter().map(|x| x * &rb).collect();
                for (x, s) in coords[k].iter_mut().zip(sub) {
                    *x -= s;
                }
                real[k] = embed(&coords[k]);
                g = gso(&real);
            }
        }
        let m = g.mu[k][k - 1];
        if g.norms[k] >= (delta - m * m) * g.norms[k - 1] {
            k += 1;
        } else {
            coords.swap(k, k - 1);
            real.swap(k, k - 1);
            k = if k > 1 { k - 1 } else { 1 };
        }
    }
    coords
}

/// All non-zero integer combinations x (up to global sign: the last non-zero entry is
/// positive) with |sum x_i b_i|^2 <= bound, where b_i are the real rows of `basis`.
/// Stops after `cap` solutions; the boolean reports whether the list is complete.
pub fn short_vectors(basis: &[Vec<f64>], bound: f64, cap: usize) -> (Vec<Vec<i64>>, bool) {
    let n = basis.len();
    let g = gso(basis);
    if g.norms.iter().any(|&b| !(b > 0.0)) {
        return (vec![], false);
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let mut complete = true;
    enumerate(n, &g, bound, &mut x, n, true, &mut out, cap, &mut complete);
    (out, complete)
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    n: usize,
    g: &Gso,
    remaining: f64,
    x: &mut Vec<i64>,
    level: usize,
    higher_zero: bool,
    out: &mut Vec<Vec<i64>>,
    cap: usize,
    complete: &mut bool,
) {
    if !*complete {
        return;
    }
    if level == 0 {
        if !higher_zero {
            if out.len() >= cap {
                *complete = false;
                return;
            }
            out.push(x.clone());
        }
        return;
    }
    let i = level - 1;
    let c: f64 = -(i + 1..n).map(|j| g.mu[j][i] * x[j] as f64).sum::<f64>();
    let r = (remaining.max(0.0) / g.norms[i]).sqrt() * (1.0 + 1e-12) + 1e-12;
    let lo = (c - r).ceil() as i64;
    let hi = (c + r).floor() as i64;
    let lo = if higher_zero { lo.max(0) } else { lo };
    for v in lo..=hi {
        let t = v as f64 - c;
        let rem = remaining - g.norms[i] * t * t;
        if rem < -1e-9 * remaining.abs().max(1.0) {
            continue;
        }
        x[i] = v;
        enumerate(n, g, rem, x, i, higher_zero && v == 0, out, cap, complete);
        if !*complete {
            break;
        }
    }
    x[i] = 0;
}

/// Integer combination of coordinate rows.
pub fn combine(coeffs: &[i64], rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let m = rows.first().map_or(0, |r| r.len());
    let mut out = vec![BigInt::zero(); m];
    for (c, row) in coeffs.iter().zip(rows) {
        if *c == 0 {
            continue;
        }
        let cb = BigInt::from(*c);
        for (o, x) in out.iter_mut().zip(row) {
            *o += &cb * x;
        }
    }
    out
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v)
}

pub fn to_f64_vec(v: &[BigInt]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lll_finds_short_basis() {
        let rows: Vec<Vec<BigInt>> = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        // Gram form of a skewed lattice: embed x -> x * B
        let b = [[1.0, 0.0, 0.0], [1000.0, 1.0, 0.0], [999.0, 1000.0, 1.0]];
        let embed = |v: &[BigInt]| {
            let f = to_f64_vec(v);
            (0..3).map(|j| (0..3).map(|i| f[i] * b[i][j]).sum()).collect::<Vec<f64>>()
        };
        let red = lll(rows, embed, 0.99);
        for r in &red {
            assert!(norm2(&embed(r)) < 10.0);
        }
    }

    #[test]
    fn enumeration_counts_cubic_lattice_points() {
        let basis = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let (v, complete) = short_vectors(&basis, 1.0, 100);
        assert!(complete);
        assert_eq!(v.len(), 3);
        let (v, _) = short_vectors(&basis, 2.0, 100);
        assert_eq!(v.len(), 9);
    }
}

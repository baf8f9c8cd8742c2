//! Field identity and the certified invariants of each field met by the sweep.

use crate::arith::lattice;
use crate::exactpoly::{approximate_roots, MonicIntPolynomial};
use crate::orderfield::MaximalOrder;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// (field discriminant, reduced defining polynomial). The polynomial is the smallest
/// canonical characteristic polynomial among the non-rational elements of minimal T2
/// in O_F, so isomorphic fields get the same key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldKey {
    #[serde(with = "crate::arith::serde_int::dec")]
    pub disc: BigInt,
    pub poly: MonicIntPolynomial,
}

impl std::fmt::Display for FieldKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} [{}]", self.disc, self.poly)
    }
}

fn t2_embedding(x: &[BigInt], vals: &[Vec<Complex64>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * vals.len());
    for row in vals {
        let z: Complex64 = row.iter().zip(x).map(|(v, c)| v * c.to_f64().unwrap()).sum();
        out.push(z.re);
        out.push(z.im);
    }
    out
}

pub fn field_key(max: &MaximalOrder) -> FieldKey {
    let basis = &max.basis;
    let d = basis.degree();
    let roots = approximate_roots(&basis.poly).expect("approximate roots of an irreducible polynomial");
    let den = basis.denominator.to_f64().unwrap();
    // vals[i][j] = b_j at root i
    let vals: Vec<Vec<Complex64>> = roots
        .iter()
        .map(|z| {
            basis
                .matrix
                .iter()
                .map(|row| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut pw = Complex64::new(1.0, 0.0);
                    for c in row {
                        acc += pw * c.to_f64().unwrap();
                        pw *= z;
                    }
                    acc / den
                })
                .collect()
        })
        .collect();
    let embed = |x: &[BigInt]| t2_embedding(x, &vals);
    let red = lattice::lll(crate::arith::intmat::identity(d), embed, 0.99);
    let rational = |x: &[BigInt]| basis.to_power_basis(x)[1..].iter().all(|c| c.is_zero());
    let t2 = |x: &[BigInt]| lattice::norm2(&embed(x));
    let bound = red.iter().filter(|x| !rational(x)).map(|x| t2(x)).fold(f64::INFINITY, f64::min);
    let real: Vec<Vec<f64>> = red.iter().map(|x| embed(x)).collect();
    let (coeffs, _) = lattice::short_vectors(&real, bound * (1.0 + 1e-9), 100_000);
    let mut cands: Vec<(f64, Vec<BigInt>)> = coeffs
        .iter()
        .map(|c| lattice::combine(c, &red))
        .filter(|x| !rational(x))
        .map(|x| (t2(&x), x))
        .collect();
    cands.extend(red.into_iter().filter(|x| !rational(x)).map(|x| (t2(&x), x)));
    let min = cands.iter().map(|(t, _)| *t).fold(f64::INFINITY, f64::min);
    let table = basis.mult_table();
    let poly = cands
        .iter()
        .filter(|(t, _)| *t <= min * (1.0 + 1e-9))
        .map(|(_, x)| MonicIntPolynomial::from_full(&table.charpoly(x)).unwrap().canonical_sign())
        .min()
        .unwrap();
    FieldKey { disc: max.field_discriminant.clone(), poly }
}

/// Certified invariants of one field, or the reason they are missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub key: FieldKey,
    pub signature: (usize, usize),
    pub h: Option<u64>,
    pub regulator: Option<f64>,
    pub regulator_lower_bound: Option<f64>,
    pub failure: Option<String>,
}

impl FieldRecord {
    pub fn hr(&self) -> Option<f64> {
        Some(self.h? as f64 * self.regulator?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orderfield::maximal_order;

    #[test]
    fn isomorphic_generators_share_a_key() {
        // theta, theta^-1 and 1 + theta generate the disc -23 field
        let polys = [vec![-1, -1, 0], vec![-1, 0, 1], vec![-1, 2, -3]];
        let keys: Vec<FieldKey> = polys.iter().map(|c| field_key(&maximal_order(&MonicIntPolynomial::from_i64(c)))).collect();
        assert_eq!(keys[0].disc, BigInt::from(-23));
        assert!(keys.iter().all(|k| *k == keys[0]), "{keys:?}");
    }

    #[test]
    fn non_monogenic_field_key() {
        let a = field_key(&maximal_order(&MonicIntPolynomial::from_i64(&[8, -2, 1])));
        assert_eq!(a.disc, BigInt::from(-503));
        let b = field_key(&maximal_order(&a.poly));
        assert_eq!(a, b);
    }
}

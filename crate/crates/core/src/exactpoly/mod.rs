//! Exact monic integer polynomials: discriminants, irreducibility, certified roots and
//! the Galois multiplicity of a characteristic polynomial.

mod factor;
mod poly;
mod roots;

pub use factor::{factor_degrees, factor_squarefree, is_irreducible};
pub use poly::{discriminant, MonicIntPolynomial};
pub use roots::{
    approximate_roots, isolate_roots, isolate_roots_capped, round_fixed, EmbeddingProfile, RootEnclosure,
    DEFAULT_PRECISION_CAP,
};

use crate::arith::fq;
use crate::arith::primes;
use crate::arith::zpoly::{self, ZPoly};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum ExactPolyError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("polynomial {0} is reducible")]
    Reducible(String),
    #[error("precision {0} below the 64-bit minimum")]
    PrecisionTooLow(u32),
}

/// Number of distinct roots of p lying in Q[x]/(p): d when the field is Galois over Q,
/// otherwise 1 (prime degree leaves no other option).
pub fn multiplicity_in_field(p: &MonicIntPolynomial) -> Result<usize, ExactPolyError> {
    let d = p.degree();
    let disc = discriminant(p);
    if disc.is_zero() {
        return Err(ExactPolyError::DegenerateInput("repeated roots".into()));
    }
    if d == 3 {
        // disc(p) = disc(F) * index^2, so the field discriminant is a square iff disc(p) is
        return Ok(if primes::is_square(&disc) { 3 } else { 1 });
    }
    Ok(if is_galois_general(p, &disc)? { d } else { 1 })
}

/// Galois test for prime degree: reject on any unramified factorization pattern other
/// than 1^d or d; otherwise search for a non-trivial automorphism theta -> g(theta)
/// and verify it exactly.
fn is_galois_general(p: &MonicIntPolynomial, disc: &BigInt) -> Result<bool, ExactPolyError> {
    let d = p.degree();
    let full = p.full();
    let mut checked = 0;
    for q in primes::primes_up_to(5000) {
        if (disc % BigInt::from(q)).is_zero() {
            continue;
        }
        let fp: Vec<u64> = full.iter().map(|c| fq::reduce_big(c, q)).collect();
        let fac = fq::factor(&fp, q);
        let degs: Vec<usize> = fac.iter().map(|(g, _)| g.len() - 1).collect();
        if !(degs.iter().all(|&k| k == 1) || degs == [d]) {
            return Ok(false);
        }
        checked += 1;
        if checked >= 40 {
            break;
        }
    }
    Ok(find_automorphism(p, disc).is_some())
}

/// Searches d-cycles of the roots for an interpolating polynomial with coefficients in
/// (1/|disc|) Z that maps theta to another root; returns |disc| * g when verified.
pub fn find_automorphism(p: &MonicIntPolynomial, disc: &BigInt) -> Option<ZPoly> {
    let d = p.degree();
    let prof = isolate_roots(p, 128 + 4 * disc.bits() as u32).ok()?;
    let alpha: Vec<Complex64> = prof.centers();
    let den = disc.abs();
    let den_f = den.to_f64()?;
    // Lagrange basis numerators and denominators
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for i in 0..d {
        let mut num = vec![Complex64::new(1.0, 0.0)];
        let mut scale = Complex64::new(1.0, 0.0);
        for k in 0..d {
            if k == i {
                continue;
            }
            let mut next = vec![Complex64::new(0.0, 0.0); num.len() + 1];
            for (j, c) in num.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= c * alpha[k];
            }
            num = next;
            scale *= alpha[i] - alpha[k];
        }
        basis.push(num.into_iter().map(|c| c / scale).collect());
    }
    let mut perm: Vec<usize> = (1..d).collect();
    loop {
        // cycle 0 -> perm[0] -> perm[1] -> ... -> 0
        let mut image = vec![0usize; d];
        let mut cur = 0;
        for &n in &perm {
            image[cur] = n;
            cur = n;
        }
        image[cur] = 0;
        let mut g = vec![Complex64::new(0.0, 0.0); d];
        for i in 0..d {
            for (j, c) in basis[i].iter().enumerate() {
                g[j] += c * alpha[image[i]];
            }
        }
        let rounded: Option<ZPoly> = g
            .iter()
            .map(|c| {
                let v = c.re * den_f;
                if c.im.abs() * den_f < 1e-3 && (v - v.round()).abs() < 1e-3 && v.abs() < 1e15 {
                    Some(BigInt::from(v.round() as i64))
                } else {
                    None
                }
            })
            .collect();
        if let Some(big_g) = rounded {
            if verify_automorphism(&full_of(p), &big_g, &den) {
                return Some(big_g);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    None
}

fn full_of(p: &MonicIntPolynomial) -> ZPoly {
    p.full()
}

/// Checks p(G/D) = 0 mod p exactly, i.e. sum c_i G^i D^{d-i} is divisible by p, and
/// that G/D is not theta itself.
fn verify_automorphism(p: &ZPoly, g: &ZPoly, den: &BigInt) -> bool {
    let d = zpoly::degree(p);
    let mut identity = vec![BigInt::zero(); d];
    identity[1] = den.clone();
    let mut gt = g.clone();
    gt.resize(d, BigInt::zero());
    if gt == identity {
        return false;
    }
    let mut acc: ZPoly = vec![BigInt::zero()];
    let mut gpow: ZPoly = vec![BigInt::from(1)];
    for i in 0..=d {
        let scale = num_traits::pow(den.clone(), d - i);
        let term: ZPoly = gpow.iter().map(|c| c * &p[i] * &scale).collect();
        acc = zpoly::sub(&acc, &term.iter().map(|c| -c).collect::<ZPoly>());
        gpow = zpoly::divrem_monic(&zpoly::mul(&gpow, g), p).1;
    }
    let r = zpoly::divrem_monic(&acc, p).1;
    zpoly::is_zero(&r)
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&MonicIntPolynomial::from_i64(&[-1, -1, 0])), BigInt::from(-23));
        assert_eq!(discriminant(&MonicIntPolynomial::from_i64(&[-1, -3, 0])), BigInt::from(81));
        assert_eq!(discriminant(&MonicIntPolynomial::from_i64(&[0, 0, 0])), BigInt::from(0));
    }

    #[test]
    fn multiplicities() {
        assert_eq!(multiplicity_in_field(&MonicIntPolynomial::from_i64(&[-1, -3, 0])).unwrap(), 3);
        assert_eq!(multiplicity_in_field(&MonicIntPolynomial::from_i64(&[-1, -1, 0])).unwrap(), 1);
        assert_eq!(multiplicity_in_field(&MonicIntPolynomial::from_i64(&[1, -2, -1])).unwrap(), 3);
    }

    #[test]
    fn cyclic_quintic_has_all_roots() {
        // x^5 + x^4 - 4x^3 - 3x^2 + 3x + 1, the real subfield of the 11th cyclotomic field
        let p = MonicIntPolynomial::from_i64(&[1, 3, -3, -4, 1]);
        assert_eq!(multiplicity_in_field(&p).unwrap(), 5);
        assert_eq!(multiplicity_in_field(&MonicIntPolynomial::from_i64(&[-1, -1, 0, 0, 0])).unwrap(), 1);
    }

    #[test]
    fn general_path_agrees_on_cubics() {
        for c in [[-1i64, -3, 0], [1, -2, -1], [-1, -1, 0], [-1, -4, 1]] {
            let p = MonicIntPolynomial::from_i64(&c);
            let disc = discriminant(&p);
            assert_eq!(is_galois_general(&p, &disc).unwrap(), primes::is_square(&disc), "{p}");
        }
    }
}

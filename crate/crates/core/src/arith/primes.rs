//! Integer factorization and small-prime utilities.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Prime factorization of |n| (n != 0) as an ordered map prime -> exponent.
pub fn factorize(n: &BigInt) -> BTreeMap<BigUint, usize> {
    assert!(!n.is_zero(), "factorization of zero");
    let m = n.abs().to_biguint().unwrap();
    if let Some(small) = m.to_u64() {
        return num_prime::nt_funcs::factorize64(small)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
    }
    let (found, rest) = num_prime::nt_funcs::factors(m, None);
    if let Some(rest) = rest {
        // not fully factored by the heuristics; fall back to trial splitting of the rest
        let mut out = found;
        for r in rest {
            for (p, e) in trial_factor(&r) {
                *out.entry(p).or_insert(0) += e;
            }
        }
        return out;
    }
    found
}

fn trial_factor(n: &BigUint) -> BTreeMap<BigUint, usize> {
    let mut out = BTreeMap::new();
    let mut m = n.clone();
    let mut p = BigUint::from(2u32);
    while &p * &p <= m {
        while (&m % &p).is_zero() {
            m /= &p;
            *out.entry(p.clone()).or_insert(0) += 1;
        }
        p += 1u32;
    }
    if m > BigUint::one() {
        *out.entry(m).or_insert(0) += 1;
    }
    out
}

/// Primes q with q^2 dividing n.
pub fn square_divisors(n: &BigInt) -> Vec<u64> {
    factorize(n)
        .into_iter()
        .filter(|(_, e)| *e >= 2)
        .map(|(p, _)| p.to_u64().expect("prime too large for word-size arithmetic"))
        .collect()
}

pub fn is_prime(n: u64) -> bool {
    num_prime::nt_funcs::is_prime64(n)
}

/// Primes in [2, bound].
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return vec![];
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

pub fn is_square(n: &BigInt) -> bool {
    if n.sign() == Sign::Minus {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Exponent of the prime q in n (n != 0).
pub fn valuation(n: &BigInt, q: u64) -> usize {
    let qb = BigInt::from(q);
    let mut m = n.clone();
    let mut v = 0;
    while !m.is_zero() && (&m % &qb).is_zero() {
        m /= &qb;
        v += 1;
    }
    v
}

use crate::arith::zpoly::{self, ZPoly};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Monic polynomial x^d + c_{d-1} x^{d-1} + ... + c_0 with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonicIntPolynomial {
    /// c_0 .. c_{d-1}; the leading 1 is implicit.
    #[serde(with = "crate::arith::serde_int::dec_vec")]
    coeffs: Vec<BigInt>,
}

impl MonicIntPolynomial {
    /// Builds from c_0..c_{d-1}. Panics on an empty list (degree must be positive).
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "monic polynomial needs positive degree");
        MonicIntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// From a full coefficient list, low degree first, whose last entry must be 1.
    pub fn from_full(full: &[BigInt]) -> Option<Self> {
        let (last, rest) = full.split_last()?;
        if !last.is_one() || rest.is_empty() {
            return None;
        }
        Some(Self::new(rest.to_vec()))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        if i == self.degree() {
            BigInt::one()
        } else {
            self.coeffs[i].clone()
        }
    }

    pub fn constant_term(&self) -> &BigInt {
        &self.coeffs[0]
    }

    /// All d+1 coefficients, low degree first.
    pub fn full(&self) -> ZPoly {
        let mut v = self.coeffs.clone();
        v.push(BigInt::one());
        v
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        zpoly::eval(&self.full(), x)
    }

    /// (-1)^d p(-x): the characteristic polynomial of -theta.
    pub fn negated_root(&self) -> Self {
        let d = self.degree();
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if (d - i) % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// Characteristic polynomial of 1/theta: x^d p(1/x) / c_0. Requires c_0 = +-1.
    pub fn reciprocal(&self) -> Option<Self> {
        let c0 = self.constant_term().clone();
        if !c0.abs().is_one() {
            return None;
        }
        let full = self.full();
        let d = self.degree();
        let rev: Vec<BigInt> = (0..d).map(|i| &full[d - i] * &c0).collect();
        Some(Self::new(rev))
    }

    /// Canonical representative of the pair {p(x), (-1)^d p(-x)}: the lexicographically
    /// smaller coefficient vector, compared from c_0 upward.
    pub fn canonical_sign(&self) -> Self {
        let other = self.negated_root();
        if other.coeffs < self.coeffs {
            other
        } else {
            self.clone()
        }
    }

    /// Coefficients as i64 when they all fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }

    /// e_k, the k-th elementary symmetric function of the roots: (-1)^k c_{d-k}.
    pub fn elementary(&self, k: usize) -> BigInt {
        let d = self.degree();
        let c = self.coeff(d - k);
        if k % 2 == 1 {
            -c
        } else {
            c
        }
    }
}

impl fmt::Display for MonicIntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        write!(f, "x^{d}")?;
        for i in (0..d).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { " - " } else { " + " };
            let a = c.abs();
            let mag = if a.is_one() && i > 0 { String::new() } else { a.to_string() };
            match i {
                0 => write!(f, "{sign}{a}")?,
                1 => write!(f, "{sign}{mag}x")?,
                _ => write!(f, "{sign}{mag}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Parses a comma-separated coefficient list c_0,c_1,...,c_{d-1}.
impl std::str::FromStr for MonicIntPolynomial {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let coeffs: Result<Vec<BigInt>, _> = s
            .trim()
            .trim_matches(|c| c == '[' || c == ']')
            .split(',')
            .map(|t| t.trim().parse::<BigInt>())
            .collect();
        let coeffs = coeffs.map_err(|e| format!("bad coefficient list {s:?}: {e}"))?;
        if coeffs.is_empty() {
            return Err("empty coefficient list".into());
        }
        Ok(Self::new(coeffs))
    }
}

/// disc(p) = (-1)^{d(d-1)/2} Res(p, p').
pub fn discriminant(p: &MonicIntPolynomial) -> BigInt {
    let d = p.degree();
    let full = p.full();
    let res = zpoly::resultant(&full, &zpoly::derivative(&full));
    if (d * (d - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse() {
        let p = MonicIntPolynomial::from_i64(&[-1, -1, 0]);
        assert_eq!(p.to_string(), "x^3 - x - 1");
        let q: MonicIntPolynomial = "-1,-1,0".parse().unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn reciprocal_and_negation() {
        let p = MonicIntPolynomial::from_i64(&[-1, -1, 0]);
        // 1/theta has char poly x^3 + x^2 - 1
        assert_eq!(p.reciprocal().unwrap(), MonicIntPolynomial::from_i64(&[-1, 0, 1]));
        // -theta: x^3 - x + 1
        assert_eq!(p.negated_root(), MonicIntPolynomial::from_i64(&[1, -1, 0]));
        assert_eq!(p.canonical_sign(), p);
        assert_eq!(p.negated_root().canonical_sign(), p);
    }
}

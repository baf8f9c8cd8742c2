//! Binary fixed-point reals: a value `v` is stored as the integer `round(v * 2^bits)`.
//! All helpers take the scale explicitly; error per operation is at most one unit in
//! the last place unless stated otherwise.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn from_int(n: &BigInt, bits: u32) -> BigInt {
    n << bits
}

pub fn one(bits: u32) -> BigInt {
    BigInt::one() << bits
}

/// Product, truncated toward negative infinity.
pub fn mul(a: &BigInt, b: &BigInt, bits: u32) -> BigInt {
    (a * b) >> bits
}

/// Quotient `a / b`, truncated.
pub fn div(a: &BigInt, b: &BigInt, bits: u32) -> BigInt {
    (a << bits) / b
}

/// Floor of the square root of a non-negative fixed-point value.
pub fn sqrt(a: &BigInt, bits: u32) -> BigInt {
    assert!(!a.is_negative(), "sqrt of negative fixed-point value");
    (a << bits).sqrt()
}

/// Rescale from `from` bits to `to` bits (truncating when shrinking).
pub fn rescale(a: &BigInt, from: u32, to: u32) -> BigInt {
    if to >= from {
        a << (to - from)
    } else {
        a >> (from - to)
    }
}

/// Nearest f64 to a fixed-point value, accurate even when the integer is huge.
pub fn to_f64(a: &BigInt, bits: u32) -> f64 {
    let len = a.bits();
    if len <= 1000 {
        let shift = len.saturating_sub(60);
        let top = (a >> shift).to_f64().unwrap_or(0.0);
        return top * 2f64.powi(shift as i32 - bits as i32);
    }
    let shift = len - 60;
    let top = (a >> shift).to_f64().unwrap_or(0.0);
    let e = shift as i64 - bits as i64;
    if e > 1023 {
        return if a.sign() == Sign::Minus { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    top * 2f64.powi(e as i32)
}

/// Exact conversion of a finite f64 into fixed point (truncated below 2^-bits).
pub fn from_f64(x: f64, bits: u32) -> BigInt {
    assert!(x.is_finite());
    if x == 0.0 {
        return BigInt::zero();
    }
    let (mant, exp) = decompose(x);
    let m = BigInt::from(mant);
    let shift = exp + bits as i64;
    if shift >= 0 {
        m << (shift as u64)
    } else {
        m >> ((-shift) as u64)
    }
}

/// Splits a finite non-zero f64 as `mant * 2^exp` with integer mantissa.
pub fn decompose(x: f64) -> (i64, i64) {
    let b = x.to_bits();
    let sign = if b >> 63 == 1 { -1i64 } else { 1 };
    let e = ((b >> 52) & 0x7ff) as i64;
    let frac = (b & ((1u64 << 52) - 1)) as i64;
    if e == 0 {
        (sign * frac, -1074)
    } else {
        (sign * (frac | (1i64 << 52)), e - 1075)
    }
}

fn atanh_inv(n: u64, bits: u32) -> BigInt {
    // atanh(1/n) = sum 1/((2k+1) n^(2k+1))
    let n2 = BigInt::from(n) * BigInt::from(n);
    let mut power = one(bits) / BigInt::from(n);
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !power.is_zero() {
        sum += &power / BigInt::from(k);
        power /= &n2;
        k += 2;
    }
    sum
}

/// ln 2 at the requested scale.
pub fn ln2(bits: u32) -> BigInt {
    let g = bits + 16;
    rescale(&(atanh_inv(3, g) << 1), g, bits)
}

/// Natural logarithm of a positive fixed-point value.
pub fn ln(x: &BigInt, bits: u32) -> BigInt {
    assert!(x.is_positive(), "ln of non-positive value");
    let g = bits + 24;
    let xg = rescale(x, bits, g);
    // x = y * 2^n with y in [1, 2)
    let n = xg.bits() as i64 - 1 - g as i64;
    let y = if n >= 0 { &xg >> (n as u64) } else { &xg << ((-n) as u64) };
    let unit = one(g);
    // ln y = 2 atanh((y-1)/(y+1)), argument in [0, 1/3)
    let z = div(&(&y - &unit), &(&y + &unit), g);
    let z2 = mul(&z, &z, g);
    let mut term = z.clone();
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !term.is_zero() {
        sum += &term / BigInt::from(k);
        term = mul(&term, &z2, g);
        k += 2;
    }
    let total = (sum << 1) + BigInt::from(n) * ln2(g);
    rescale(&total, g, bits)
}

/// `ln(|re + i im|)` where the arguments are fixed-point at `bits`; computed as half the
/// logarithm of the squared modulus so no square root is taken.
pub fn ln_abs_complex(re: &BigInt, im: &BigInt, bits: u32) -> BigInt {
    let sq = mul(re, re, bits) + mul(im, im, bits);
    if sq.is_positive() {
        return ln(&sq, bits) >> 1;
    }
    // modulus below 2^(-bits/2): redo with the exact squared numerator
    let exact = re * re + im * im;
    assert!(exact.is_positive(), "logarithm of zero");
    rescale(&ln(&exact, 2 * bits), 2 * bits, bits) >> 1
}

/// Exact comparison helper: `a * 2^-ba` vs `b * 2^-bb`.
pub fn cmp_scaled(a: &BigInt, ba: u32, b: &BigInt, bb: u32) -> std::cmp::Ordering {
    let m = ba.max(bb);
    rescale(a, ba, m).cmp(&rescale(b, bb, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_small_values() {
        let bits = 200;
        for &x in &[1.0f64, 2.0, 0.5, 3.0, 10.0, 1e-30, 12345.678] {
            let v = ln(&from_f64(x, bits), bits);
            assert!((to_f64(&v, bits) - x.ln()).abs() < 1e-14, "{x}");
        }
    }

    #[test]
    fn ln2_digits() {
        // 0.693147180559945309417232121458176568...
        let v = ln2(128);
        let s = (v * BigInt::from(10).pow(30u32)) >> 128u32;
        assert_eq!(s.to_string(), "693147180559945309417232121458");
    }

    #[test]
    fn exp_identity_at_high_precision() {
        let bits = 512;
        let a = ln(&from_int(&BigInt::from(6), bits), bits);
        let b = ln(&from_int(&BigInt::from(2), bits), bits) + ln(&from_int(&BigInt::from(3), bits), bits);
        assert!((a - b).abs() < BigInt::from(8));
    }

    #[test]
    fn f64_round_trip() {
        for &x in &[1.5f64, -2.25, 1e-10, 123456789.0] {
            assert_eq!(to_f64(&from_f64(x, 200), 200), x);
        }
    }
}

//! Certified root isolation.
//!
//! Approximations come from Aberth iterations (f64 start, then binary fixed point).
//! Certification uses the Weierstrass inclusion disks D(z_i, d |W_i|) with
//! W_i = p(z_i) / prod_{j != i}(z_i - z_j): when the disks are pairwise disjoint each
//! holds exactly one root. Centres are snapped so that the configuration is exactly
//! conjugation-symmetric; a disk centred on the real axis then holds a real root and a
//! disk off the axis a non-real one. All inclusion tests run in exact integer
//! arithmetic on dyadic centres.

use super::factor::is_irreducible;
use super::poly::{discriminant, MonicIntPolynomial};
use super::ExactPolyError;
use crate::arith::fixed;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Default ceiling for adaptive precision.
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

/// Disk with dyadic centre (re + i im) / 2^scale and radius at most radius / 2^scale.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootEnclosure {
    pub re: BigInt,
    pub im: BigInt,
    pub radius: BigInt,
    pub scale: u32,
}

impl RootEnclosure {
    pub fn center(&self) -> Complex64 {
        Complex64::new(fixed::to_f64(&self.re, self.scale), fixed::to_f64(&self.im, self.scale))
    }

    pub fn radius_f64(&self) -> f64 {
        fixed::to_f64(&self.radius, self.scale)
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Centre rescaled to `bits` (truncated).
    pub fn center_fixed(&self, bits: u32) -> (BigInt, BigInt) {
        (fixed::rescale(&self.re, self.scale, bits), fixed::rescale(&self.im, self.scale, bits))
    }
}

/// Certified isolation of all roots of an irreducible polynomial.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddingProfile {
    /// Real roots by decreasing modulus, then one representative (positive imaginary
    /// part) of each conjugate pair by decreasing modulus, then the conjugates of those
    /// representatives in the same order.
    pub roots: Vec<RootEnclosure>,
    pub signature: (usize, usize),
    /// All d values ln|root|, sorted descending.
    pub log_moduli: Vec<f64>,
    pub precision_bits: u32,
    /// Precision actually used by the certification step.
    pub working_bits: u32,
    /// ln|rho_1| >= ... >= ln|rho_r| at `precision_bits`, fixed point.
    pub real_logs: Vec<BigInt>,
    /// ln|sigma_1| >= ... >= ln|sigma_s| at `precision_bits`, fixed point.
    pub complex_logs: Vec<BigInt>,
    /// Set when non-conjugate roots share a modulus exactly. Only binomials x^d + c_0
    /// are recognised (all moduli equal |c_0|^(1/d)); other ties are refused.
    #[serde(default)]
    pub wall: bool,
}

impl EmbeddingProfile {
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn real_roots(&self) -> &[RootEnclosure] {
        &self.roots[..self.signature.0]
    }

    /// Upper-half-plane representatives of the conjugate pairs.
    pub fn complex_roots(&self) -> &[RootEnclosure] {
        let (r, s) = self.signature;
        &self.roots[r..r + s]
    }

    pub fn centers(&self) -> Vec<Complex64> {
        self.roots.iter().map(|e| e.center()).collect()
    }

    /// Index of the conjugate partner of root i (itself for real roots).
    pub fn conjugate_of(&self, i: usize) -> usize {
        let (r, s) = self.signature;
        if i < r {
            i
        } else if i < r + s {
            i + s
        } else {
            i - s
        }
    }

    /// Sum of all log-moduli in fixed point (should equal ln|c_0|).
    pub fn log_sum_fixed(&self) -> BigInt {
        let r: BigInt = self.real_logs.iter().sum();
        let c: BigInt = self.complex_logs.iter().sum();
        r + (c << 1)
    }

    pub fn real_log_f64(&self) -> Vec<f64> {
        self.real_logs.iter().map(|x| fixed::to_f64(x, self.precision_bits)).collect()
    }

    pub fn complex_log_f64(&self) -> Vec<f64> {
        self.complex_logs.iter().map(|x| fixed::to_f64(x, self.precision_bits)).collect()
    }
}

#[derive(Clone, Debug)]
struct CFix {
    re: BigInt,
    im: BigInt,
}

impl CFix {
    fn sub(&self, o: &CFix) -> CFix {
        CFix { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn add(&self, o: &CFix) -> CFix {
        CFix { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn mul(&self, o: &CFix, bits: u32) -> CFix {
        CFix {
            re: fixed::mul(&self.re, &o.re, bits) - fixed::mul(&self.im, &o.im, bits),
            im: fixed::mul(&self.re, &o.im, bits) + fixed::mul(&self.im, &o.re, bits),
        }
    }
    fn div(&self, o: &CFix, bits: u32) -> Option<CFix> {
        let den = &o.re * &o.re + &o.im * &o.im;
        if den.is_zero() {
            return None;
        }
        let nr = &self.re * &o.re + &self.im * &o.im;
        let ni = &self.im * &o.re - &self.re * &o.im;
        Some(CFix { re: (nr << bits) / &den, im: (ni << bits) / &den })
    }
    fn abs2_f64(&self, bits: u32) -> f64 {
        let r = fixed::to_f64(&self.re, bits);
        let i = fixed::to_f64(&self.im, bits);
        r * r + i * i
    }
}

/// Aberth iterations in f64; returns None if the iteration breaks down.
fn aberth_f64(p: &MonicIntPolynomial) -> Option<Vec<Complex64>> {
    let d = p.degree();
    let c: Vec<f64> = p.full().iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect();
    if c.iter().any(|x| !x.is_finite()) {
        return None;
    }
    // Fujiwara bound
    let bound = (0..d)
        .map(|k| (c[k].abs()).powf(1.0 / (d - k) as f64))
        .fold(0.0f64, f64::max)
        * 2.0
        + 1e-3;
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(bound * 0.5 + 0.1, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(1.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for k in (0..d).rev() {
            dv = dv * x + v;
            v = v * x + c[k];
        }
        (v, dv)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (v, dv) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let n = v / dv;
            let s: Complex64 = (0..d).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = n / (1.0 - n * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                return None;
            }
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    if z.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return None;
    }
    Some(z)
}

fn eval_fixed(coeffs: &[BigInt], z: &CFix, bits: u32) -> (CFix, CFix) {
    let d = coeffs.len() - 1;
    let mut v = CFix { re: fixed::one(bits), im: BigInt::zero() };
    let mut dv = CFix { re: BigInt::zero(), im: BigInt::zero() };
    for k in (0..d).rev() {
        dv = dv.mul(z, bits).add(&v);
        v = v.mul(z, bits);
        v.re += &coeffs[k] << bits;
    }
    (v, dv)
}

/// Aberth refinement in fixed point at `bits`.
fn aberth_fixed(p: &MonicIntPolynomial, start: &[CFix], bits: u32) -> Vec<CFix> {
    let d = p.degree();
    let coeffs = p.full();
    let mut z: Vec<CFix> = start.to_vec();
    let target = 2f64.powi(-(bits as i32) + 8);
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (v, dv) = eval_fixed(&coeffs, &z[i], bits);
            if v.re.is_zero() && v.im.is_zero() {
                continue;
            }
            let Some(n) = v.div(&dv, bits) else { continue };
            let mut s = CFix { re: BigInt::zero(), im: BigInt::zero() };
            for j in 0..d {
                if j != i {
                    if let Some(t) = (CFix { re: fixed::one(bits), im: BigInt::zero() }).div(&z[i].sub(&z[j]), bits) {
                        s = s.add(&t);
                    }
                }
            }
            let den = CFix { re: fixed::one(bits), im: BigInt::zero() }.sub(&n.mul(&s, bits));
            let Some(w) = n.div(&den, bits) else { continue };
            z[i] = z[i].sub(&w);
            moved = moved.max(w.abs2_f64(bits).sqrt() / (1.0 + z[i].abs2_f64(bits).sqrt()));
        }
        if moved <= target {
            break;
        }
    }
    z
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    let r = n.sqrt();
    if &r * &r == *n {
        r
    } else {
        r + 1
    }
}

/// Makes the centre configuration exactly conjugation-symmetric. Returns the indices
/// of real centres and of upper-half representatives, or None if the pairing fails.
fn symmetrize(z: &mut [CFix], bits: u32) -> Option<(Vec<usize>, Vec<usize>)> {
    let d = z.len();
    let tol = fixed::one(bits / 2);
    let mut real = Vec::new();
    let mut complex = Vec::new();
    let mut used = vec![false; d];
    for i in 0..d {
        let mag = z[i].re.abs() + fixed::one(bits);
        if z[i].im.abs() * fixed::one(bits) <= &tol * &mag {
            z[i].im = BigInt::zero();
            real.push(i);
            used[i] = true;
        }
    }
    for i in 0..d {
        if used[i] || z[i].im.is_negative() {
            continue;
        }
        // closest unused centre to conj(z_i)
        let mut best: Option<(usize, BigInt)> = None;
        for j in 0..d {
            if used[j] || j == i || !z[j].im.is_negative() {
                continue;
            }
            let dr = &z[i].re - &z[j].re;
            let di = &z[i].im + &z[j].im;
            let dist = &dr * &dr + &di * &di;
            if best.as_ref().map_or(true, |(_, b)| dist < *b) {
                best = Some((j, dist));
            }
        }
        let (j, _) = best?;
        let re: BigInt = (&z[i].re + &z[j].re) >> 1;
        let im: BigInt = (&z[i].im - &z[j].im) >> 1;
        z[i] = CFix { re: re.clone(), im: im.clone() };
        z[j] = CFix { re, im: -im };
        used[i] = true;
        used[j] = true;
        complex.push((i, j));
    }
    if used.iter().any(|u| !u) {
        return None;
    }
    Some((real, complex.into_iter().map(|(i, _)| i).collect()))
}

struct Certified {
    centers: Vec<CFix>,
    radii: Vec<BigInt>,
    real: Vec<usize>,
    upper: Vec<usize>,
}

/// Exact inclusion radii (numerators at scale 2^bits); None if a centre coincides with
/// another.
fn inclusion_radii(p: &MonicIntPolynomial, z: &[CFix], bits: u32) -> Option<Vec<BigInt>> {
    let d = z.len();
    let coeffs = p.full();
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        // A = p(z_i) 2^{d bits}
        let (zr, zi) = (&z[i].re, &z[i].im);
        let mut ar = BigInt::one();
        let mut ai = BigInt::zero();
        for k in (0..d).rev() {
            let nr = &ar * zr - &ai * zi;
            let ni = &ar * zi + &ai * zr;
            ar = nr + (&coeffs[k] << ((d - k) as u32 * bits));
            ai = ni;
        }
        // Q = prod (Z_i - Z_j)
        let mut qr = BigInt::one();
        let mut qi = BigInt::zero();
        for j in 0..d {
            if j == i {
                continue;
            }
            let dr = zr - &z[j].re;
            let di = zi - &z[j].im;
            let nr = &qr * &dr - &qi * &di;
            let ni = &qr * &di + &qi * &dr;
            qr = nr;
            qi = ni;
        }
        let q2 = &qr * &qr + &qi * &qi;
        if q2.is_zero() {
            return None;
        }
        let a2 = &ar * &ar + &ai * &ai;
        // radius * 2^bits = d |A| / |Q|
        let num = a2 * BigInt::from((d * d) as u64);
        let t = num.div_ceil(&q2);
        out.push(ceil_sqrt(&t));
    }
    Some(out)
}

fn certify(p: &MonicIntPolynomial, z: &mut Vec<CFix>, bits: u32) -> Option<Certified> {
    let (real, upper) = symmetrize(z, bits)?;
    let radii = inclusion_radii(p, z, bits)?;
    let d = z.len();
    for i in 0..d {
        for j in i + 1..d {
            let dr = &z[i].re - &z[j].re;
            let di = &z[i].im - &z[j].im;
            let dist2 = &dr * &dr + &di * &di;
            let rs = &radii[i] + &radii[j];
            if dist2 <= &rs * &rs {
                return None;
            }
        }
    }
    Some(Certified { centers: z.clone(), radii, real, upper })
}

/// Certified lower/upper bounds (numerators at scale 2^bits) of |root| for a disk.
fn modulus_interval(c: &CFix, r: &BigInt) -> (BigInt, BigInt) {
    let m2 = &c.re * &c.re + &c.im * &c.im;
    let lo = m2.sqrt() - r;
    let hi = ceil_sqrt(&m2) + r;
    (lo, hi)
}

fn cmp_modulus_desc(a: &CFix, b: &CFix) -> Ordering {
    let ma = &a.re * &a.re + &a.im * &a.im;
    let mb = &b.re * &b.re + &b.im * &b.im;
    mb.cmp(&ma)
}

/// Isolates all roots of an irreducible polynomial with radii at most 2^-precision_bits,
/// escalating precision up to `cap` bits.
pub fn isolate_roots_capped(
    p: &MonicIntPolynomial,
    precision_bits: u32,
    cap: u32,
) -> Result<EmbeddingProfile, ExactPolyError> {
    if precision_bits < 64 {
        return Err(ExactPolyError::PrecisionTooLow(precision_bits));
    }
    if discriminant(p).is_zero() {
        return Err(ExactPolyError::DegenerateInput("repeated roots (discriminant 0)".into()));
    }
    if !is_irreducible(p) {
        return Err(ExactPolyError::Reducible(p.to_string()));
    }
    let d = p.degree();
    let binomial = p.coeffs()[1..].iter().all(|c| c.is_zero());
    let cap = cap.max(precision_bits * 2);
    let mut bits = 64u32;
    let mut start: Vec<CFix> = match aberth_f64(p) {
        Some(z) => z
            .iter()
            .map(|c| CFix { re: fixed::from_f64(c.re, bits), im: fixed::from_f64(c.im, bits) })
            .collect(),
        None => {
            // fall back to a circle start in fixed point
            let r: f64 = 1.0 + p.coeffs().iter().map(|c| c.to_f64().unwrap_or(1e300).abs()).fold(0.0, f64::max);
            (0..d)
                .map(|k| {
                    let c = Complex64::from_polar(r.min(1e250), 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4);
                    CFix { re: fixed::from_f64(c.re, bits), im: fixed::from_f64(c.im, bits) }
                })
                .collect()
        }
    };
    loop {
        let mut z = aberth_fixed(p, &start, bits);
        if let Some(cert) = certify(p, &mut z, bits) {
            if let Some(profile) = finish(&cert, bits, precision_bits, binomial) {
                return Ok(profile);
            }
        }
        if bits >= cap {
            return Err(ExactPolyError::DegenerateInput(format!(
                "could not separate roots or moduli of {p} within {cap} bits"
            )));
        }
        let next = (bits * 2).min(cap);
        start = z
            .iter()
            .map(|c| CFix { re: fixed::rescale(&c.re, bits, next), im: fixed::rescale(&c.im, bits, next) })
            .collect();
        bits = next;
    }
}

/// Checks the radius target and certified modulus ordering, then builds the profile.
fn finish(cert: &Certified, bits: u32, precision_bits: u32, wall: bool) -> Option<EmbeddingProfile> {
    let limit = if bits >= precision_bits { BigInt::one() << (bits - precision_bits) } else { BigInt::zero() };
    if cert.radii.iter().any(|r| *r > limit) {
        return None;
    }
    let mut real = cert.real.clone();
    let mut upper = cert.upper.clone();
    real.sort_by(|&a, &b| cmp_modulus_desc(&cert.centers[a], &cert.centers[b]));
    upper.sort_by(|&a, &b| cmp_modulus_desc(&cert.centers[a], &cert.centers[b]));
    // every non-conjugate pair must have disjoint modulus intervals
    let reps: Vec<usize> = real.iter().chain(upper.iter()).copied().collect();
    for (x, &i) in reps.iter().enumerate() {
        if wall {
            break;
        }
        for &j in &reps[x + 1..] {
            let (lo_i, hi_i) = modulus_interval(&cert.centers[i], &cert.radii[i]);
            let (lo_j, hi_j) = modulus_interval(&cert.centers[j], &cert.radii[j]);
            if !(hi_i < lo_j || hi_j < lo_i) {
                return None;
            }
        }
    }
    // a disk must stay away from zero for its logarithm to be meaningful
    for &i in &reps {
        let (lo, _) = modulus_interval(&cert.centers[i], &cert.radii[i]);
        if !lo.is_positive() {
            return None;
        }
    }
    let enclosure = |i: usize, conj: bool| RootEnclosure {
        re: cert.centers[i].re.clone(),
        im: if conj { -cert.centers[i].im.clone() } else { cert.centers[i].im.clone() },
        radius: cert.radii[i].clone(),
        scale: bits,
    };
    let mut roots: Vec<RootEnclosure> = real.iter().map(|&i| enclosure(i, false)).collect();
    roots.extend(upper.iter().map(|&i| enclosure(i, false)));
    roots.extend(upper.iter().map(|&i| enclosure(i, true)));
    let log_of = |i: usize| -> BigInt {
        let c = &cert.centers[i];
        let m2 = &c.re * &c.re + &c.im * &c.im;
        // ln|z| = (ln(m2 / 2^{2 bits})) / 2, evaluated at precision_bits + guard
        let g = precision_bits + 32;
        let x = fixed::rescale(&m2, 2 * bits, g);
        let l = if x.is_positive() {
            fixed::ln(&x, g)
        } else {
            fixed::rescale(&fixed::ln(&m2, 2 * bits), 2 * bits, g)
        };
        fixed::rescale(&(l >> 1), g, precision_bits)
    };
    let real_logs: Vec<BigInt> = real.iter().map(|&i| log_of(i)).collect();
    let complex_logs: Vec<BigInt> = upper.iter().map(|&i| log_of(i)).collect();
    let mut log_moduli: Vec<f64> = real_logs
        .iter()
        .chain(complex_logs.iter())
        .chain(complex_logs.iter())
        .map(|x| fixed::to_f64(x, precision_bits))
        .collect();
    log_moduli.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Some(EmbeddingProfile {
        roots,
        signature: (real.len(), upper.len()),
        log_moduli,
        precision_bits,
        working_bits: bits,
        real_logs,
        complex_logs,
        wall,
    })
}

pub fn isolate_roots(p: &MonicIntPolynomial, precision_bits: u32) -> Result<EmbeddingProfile, ExactPolyError> {
    isolate_roots_capped(p, precision_bits, DEFAULT_PRECISION_CAP)
}

/// Fast uncertified root approximations, for pre-filtering.
pub fn approximate_roots(p: &MonicIntPolynomial) -> Option<Vec<Complex64>> {
    aberth_f64(p)
}

/// Integer part helper used when rounding certified values.
pub fn round_fixed(x: &BigInt, bits: u32) -> BigInt {
    let half = BigInt::one() << (bits.max(1) - 1);
    (x + half).div_floor(&(BigInt::one() << bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totally_real_cubic() {
        let p = MonicIntPolynomial::from_i64(&[-1, -3, 0]);
        let prof = isolate_roots(&p, 128).unwrap();
        assert_eq!(prof.signature, (3, 0));
        let expect = [0.6309, 0.4266, -1.0575];
        for (a, b) in prof.log_moduli.iter().zip(expect) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }

    #[test]
    fn complex_cubic() {
        let p = MonicIntPolynomial::from_i64(&[-1, -1, 0]);
        let prof = isolate_roots(&p, 128).unwrap();
        assert_eq!(prof.signature, (1, 1));
        assert!((prof.log_moduli[0] - 0.2812).abs() < 1e-4);
        assert!((prof.log_moduli[1] + 0.1406).abs() < 1e-4);
        assert!(prof.roots[0].radius_f64() <= 2f64.powi(-128));
        let sum = prof.log_sum_fixed();
        assert!(sum.abs() < BigInt::from(1u64 << 40), "log sum {sum}");
    }

    #[test]
    fn cube_root_of_two() {
        let prof = isolate_roots(&MonicIntPolynomial::from_i64(&[-2, 0, 0]), 64).unwrap();
        assert_eq!(prof.signature, (1, 1));
        assert!(prof.wall);
        // x^3 - x - 1 has no ties
        assert!(!isolate_roots(&MonicIntPolynomial::from_i64(&[-1, -1, 0]), 64).unwrap().wall);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            isolate_roots(&MonicIntPolynomial::from_i64(&[0, 0, 0]), 128),
            Err(ExactPolyError::DegenerateInput(_))
        ));
        assert!(matches!(
            isolate_roots(&MonicIntPolynomial::from_i64(&[-1, 0, 0]), 128),
            Err(ExactPolyError::Reducible(_))
        ));
    }
}

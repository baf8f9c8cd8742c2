//! Chamber coordinates of units and geodesics: alpha vectors, boxes, the adjoint
//! determinant on the nilradical, index weights, the constant c and the counting
//! function Psi.

use crate::exactpoly::EmbeddingProfile;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ChamberError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-conjugate roots share a modulus")]
    WallDegeneracy,
    #[error("flat volume must be positive, got {0}")]
    NonPositiveVolume(f64),
    #[error("threshold {0} is not a positive finite number")]
    InvalidThreshold(f64),
    #[error("signature ({r},{s}) does not match degree {d}")]
    BadSignature { r: usize, s: usize, d: usize },
}

/// How box thresholds bound the coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxConvention {
    /// alpha_k <= T_k
    Linear,
    /// exp(alpha_k) <= T_k
    Multiplicative,
}

impl std::str::FromStr for BoxConvention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(BoxConvention::Linear),
            "multiplicative" => Ok(BoxConvention::Multiplicative),
            other => Err(format!("unknown box convention '{other}' (expected linear or multiplicative)")),
        }
    }
}

impl std::fmt::Display for BoxConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoxConvention::Linear => "linear",
            BoxConvention::Multiplicative => "multiplicative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub thresholds: Vec<f64>,
    pub convention: BoxConvention,
}

impl BoxSpec {
    pub fn new(thresholds: Vec<f64>, convention: BoxConvention) -> Result<Self, ChamberError> {
        if let Some(&t) = thresholds.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(ChamberError::InvalidThreshold(t));
        }
        Ok(BoxSpec { thresholds, convention })
    }

    pub fn dim(&self) -> usize {
        self.thresholds.len()
    }

    /// Upper bounds on alpha_k on the linear scale.
    pub fn linear_bounds(&self) -> Vec<f64> {
        match self.convention {
            BoxConvention::Linear => self.thresholds.clone(),
            BoxConvention::Multiplicative => self.thresholds.iter().map(|t| t.ln()).collect(),
        }
    }

    /// T_1 ... T_k, the normalizer of the counting asymptotics.
    pub fn volume(&self) -> f64 {
        self.thresholds.iter().product()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaVector {
    pub values: Vec<f64>,
    pub signature: (usize, usize),
    pub degree: usize,
}

/// alpha from place logs: `real_logs` = ln|rho_1| >= ... >= ln|rho_r|, `complex_logs` =
/// ln|sigma_1| >= ... >= ln|sigma_s|.
pub fn alpha_from_logs(real_logs: &[f64], complex_logs: &[f64]) -> AlphaVector {
    let (r, s) = (real_logs.len(), complex_logs.len());
    let d = r + 2 * s;
    let mut values = Vec::with_capacity(r + s - 1);
    for k in 1..r + s {
        let v = if k < s {
            (2 * k * (d - 2 * k)) as f64 * (complex_logs[k - 1] - complex_logs[k])
        } else if k == s {
            (2 * r * s) as f64 * (complex_logs[s - 1] - real_logs[0])
        } else {
            let i = k - s;
            ((k + s) * (r + s - k)) as f64 * (real_logs[i - 1] - real_logs[i])
        };
        values.push(v);
    }
    AlphaVector { values, signature: (r, s), degree: d }
}

pub fn alpha_coords(profile: &EmbeddingProfile) -> AlphaVector {
    alpha_from_logs(&profile.real_log_f64(), &profile.complex_log_f64())
}

/// Place logs at a point of the chamber: inverse of `alpha_from_logs` on the
/// hyperplane r-sum + 2 s-sum = 0.
pub fn logs_from_alpha(alpha: &[f64], signature: (usize, usize)) -> (Vec<f64>, Vec<f64>) {
    let (r, s) = signature;
    let d = r + 2 * s;
    // walk down the chain from sigma_1 with offset 0, then shift to zero sum
    let mut chain = vec![0.0f64; r + s];
    for k in 1..r + s {
        let coef = if k < s {
            (2 * k * (d - 2 * k)) as f64
        } else if k == s {
            (2 * r * s) as f64
        } else {
            ((k + s) * (r + s - k)) as f64
        };
        chain[k] = chain[k - 1] - alpha[k - 1] / coef;
    }
    let weighted: f64 = chain.iter().enumerate().map(|(i, x)| if i < s { 2.0 * x } else { *x }).sum();
    let shift = weighted / d as f64;
    let complex: Vec<f64> = chain[..s].iter().map(|x| x - shift).collect();
    let real: Vec<f64> = chain[s..].iter().map(|x| x - shift).collect();
    (real, complex)
}

pub fn in_box(alpha: &AlphaVector, spec: &BoxSpec) -> Result<bool, ChamberError> {
    in_box_values(&alpha.values, spec)
}

pub fn in_box_values(alpha: &[f64], spec: &BoxSpec) -> Result<bool, ChamberError> {
    if alpha.len() != spec.dim() {
        return Err(ChamberError::DimensionMismatch { expected: spec.dim(), got: alpha.len() });
    }
    Ok(match spec.convention {
        BoxConvention::Linear => alpha.iter().zip(&spec.thresholds).all(|(&a, &t)| a > 0.0 && a <= t),
        BoxConvention::Multiplicative => alpha.iter().zip(&spec.thresholds).all(|(&a, &t)| a > 0.0 && a <= t.ln()),
    })
}

const TIE: f64 = 1e-12;

/// prod (1 - mu_i/mu_j) over pairs with |mu_i| < |mu_j|, conjugate pairs excluded.
pub fn det_one_minus_ad_n(roots: &[Complex64]) -> Result<f64, ChamberError> {
    let n = roots.len();
    let scale = roots.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (a, b) = (roots[i].norm(), roots[j].norm());
            if (a - b).abs() <= TIE * scale {
                let conjugate = roots[i].im.abs() > TIE * scale && (roots[i] - roots[j].conj()).norm() <= 1e-9 * scale;
                if conjugate {
                    continue;
                }
                return Err(ChamberError::WallDegeneracy);
            }
            if a < b {
                acc *= Complex64::new(1.0, 0.0) - roots[i] / roots[j];
            }
        }
    }
    debug_assert!(acc.im.abs() <= 1e-9 * acc.norm().max(1.0), "imaginary residue {}", acc.im);
    Ok(acc.re)
}

/// Same product from certified roots; profiles flagged as walls are refused.
pub fn det_for_profile(profile: &EmbeddingProfile) -> Result<f64, ChamberError> {
    if profile.wall {
        return Err(ChamberError::WallDegeneracy);
    }
    det_one_minus_ad_n(&profile.centers())
}

/// ind = lambda / det(1 - Ad | n)
pub fn index_weight(flat_volume: f64, det: f64) -> Result<f64, ChamberError> {
    if !(flat_volume > 0.0) {
        return Err(ChamberError::NonPositiveVolume(flat_volume));
    }
    Ok(flat_volume / det)
}

/// (c, c / sqrt(r+s)).
pub fn constant_c(signature: (usize, usize), d: usize) -> Result<(f64, f64), ChamberError> {
    let (r, s) = signature;
    if r + 2 * s != d {
        return Err(ChamberError::BadSignature { r, s, d });
    }
    let mut c = std::f64::consts::SQRT_2.powi(1 - (r + s) as i32);
    for k in 1..s {
        c *= (4 * k * (d - 2 * k)) as f64;
    }
    if r * s != 0 {
        c *= (4 * r * s) as f64;
    }
    for k in s + 1..r + s {
        c *= (2 * (k + s) * (r + s - k)) as f64;
    }
    Ok((c, c / ((r + s) as f64).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicRecord {
    pub log_moduli: Vec<f64>,
    pub flat_volume: f64,
    pub alpha: AlphaVector,
    pub index_weight: f64,
    pub multiplicity: u32,
}

/// Sum of flat_volume * multiplicity over records inside the box, in record order.
pub fn psi(records: &[GeodesicRecord], spec: &BoxSpec) -> Result<f64, ChamberError> {
    let mut total = 0.0;
    for rec in records {
        if in_box(&rec.alpha, spec)? {
            total += rec.flat_volume * rec.multiplicity as f64;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{isolate_roots, MonicIntPolynomial};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn alpha_examples() {
        let a = alpha_from_logs(&[1.0, 0.0, -1.0], &[]);
        assert_eq!(a.values, vec![2.0, 2.0]);
        let t: f64 = 1.7;
        let a = alpha_from_logs(&[-2.0 * t.ln()], &[t.ln()]);
        assert!(close(a.values[0], 6.0 * t.ln(), 1e-15));
        let a = alpha_from_logs(&[0.0], &[0.0]);
        assert_eq!(a.values, vec![0.0]);
    }

    #[test]
    fn logs_from_alpha_inverts() {
        for sig in [(3, 0), (1, 1), (5, 0), (3, 1), (1, 2)] {
            let k = sig.0 + sig.1 - 1;
            let alpha: Vec<f64> = (0..k).map(|i| 0.3 + i as f64 * 0.7).collect();
            let (re, cx) = logs_from_alpha(&alpha, sig);
            let back = alpha_from_logs(&re, &cx);
            for (a, b) in back.values.iter().zip(&alpha) {
                assert!(close(*a, *b, 1e-12), "{sig:?}");
            }
            let sum: f64 = re.iter().sum::<f64>() + 2.0 * cx.iter().sum::<f64>();
            assert!(sum.abs() < 1e-12);
        }
    }

    #[test]
    fn box_examples() {
        let a = AlphaVector { values: vec![2.0, 2.0], signature: (3, 0), degree: 3 };
        let lin = BoxSpec::new(vec![2.0, 2.0], BoxConvention::Linear).unwrap();
        assert!(in_box(&a, &lin).unwrap());
        let z = AlphaVector { values: vec![0.0, 1.0], signature: (3, 0), degree: 3 };
        assert!(!in_box(&z, &BoxSpec::new(vec![1e9, 1e9], BoxConvention::Linear).unwrap()).unwrap());
        let e2 = 2.0f64.exp();
        let mul = BoxSpec::new(vec![e2, e2], BoxConvention::Multiplicative).unwrap();
        assert!(in_box(&a, &mul).unwrap());
        let one = BoxSpec::new(vec![1.0], BoxConvention::Linear).unwrap();
        assert_eq!(in_box(&a, &one), Err(ChamberError::DimensionMismatch { expected: 1, got: 2 }));
        assert!(BoxSpec::new(vec![0.0], BoxConvention::Linear).is_err());
    }

    #[test]
    fn det_examples() {
        let e = 1.0f64.exp();
        let roots = [Complex64::new(e, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0 / e, 0.0)];
        let d = det_one_minus_ad_n(&roots).unwrap();
        let want = (1.0 - 1.0 / e).powi(2) * (1.0 - 1.0 / (e * e));
        assert!(close(d, want, 1e-14));
        assert!(close(d, 0.34546, 1e-4));
        assert_eq!(det_one_minus_ad_n(&[Complex64::new(1.0, 0.0)]).unwrap(), 1.0);
        let tie = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(0.5, 0.0)];
        assert_eq!(det_one_minus_ad_n(&tie), Err(ChamberError::WallDegeneracy));
        // x^3 - x - 1: only the pairs (sigma, rho) and (conj sigma, rho) enter
        let prof = isolate_roots(&MonicIntPolynomial::from_i64(&[-1, -1, 0]), 128).unwrap();
        let c = prof.centers();
        let want = (Complex64::new(1.0, 0.0) - c[1] / c[0]).norm_sqr();
        assert!(close(det_for_profile(&prof).unwrap(), want, 1e-14));
    }

    #[test]
    fn index_weight_examples() {
        assert!(close(index_weight(1.0, 0.34546).unwrap(), 2.8947, 1e-4));
        assert_eq!(index_weight(0.0, 0.3), Err(ChamberError::NonPositiveVolume(0.0)));
    }

    #[test]
    fn constant_c_examples() {
        let (c, t) = constant_c((3, 0), 3).unwrap();
        assert!(close(c, 8.0, 1e-15) && close(t, 4.6188, 1e-4));
        let (c, t) = constant_c((1, 1), 3).unwrap();
        assert!(close(c, 2.0 * 2f64.sqrt(), 1e-15) && close(t, 2.0, 1e-15));
        let (c, _) = constant_c((5, 0), 5).unwrap();
        assert!(close(c, 2304.0, 1e-14));
        assert!(constant_c((2, 0), 3).is_err());
    }

    #[test]
    fn psi_examples() {
        let rec = |a: Vec<f64>, v: f64| GeodesicRecord {
            log_moduli: vec![],
            flat_volume: v,
            alpha: AlphaVector { values: a, signature: (3, 0), degree: 3 },
            index_weight: v,
            multiplicity: 1,
        };
        let recs = vec![rec(vec![1.0, 1.0], 2.0), rec(vec![3.0, 1.0], 5.0)];
        let b = BoxSpec::new(vec![2.0, 2.0], BoxConvention::Linear).unwrap();
        assert_eq!(psi(&recs, &b).unwrap(), 2.0);
        assert_eq!(psi(&[], &b).unwrap(), 0.0);
    }
}

//! Truncated multi-variable Dirichlet series over chamber records and the leading
//! pole term they are compared against.

use crate::chamber::GeodesicRecord;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum DirichletError {
    #[error("Re(s_{k}) = {re} <= 1: the series does not converge there")]
    DivergenceWarning { k: usize, re: f64 },
    #[error("s_{0} = 1 is the pole")]
    PoleHit(usize),
    #[error("dimension mismatch: point has {point} variables, record has {record}")]
    DimensionMismatch { point: usize, record: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub s: Vec<Complex64>,
    pub j: u32,
}

impl SeriesPoint {
    pub fn real(s: &[f64], j: u32) -> Self {
        SeriesPoint { s: s.iter().map(|&x| Complex64::new(x, 0.0)).collect(), j }
    }

    /// s = (1 + eps, ..., 1 + eps)
    pub fn diagonal(r: usize, eps: f64, j: u32) -> Self {
        Self::real(&vec![1.0 + eps; r], j)
    }

    fn check_convergent(&self) -> Result<(), DirichletError> {
        match self.s.iter().position(|z| !(z.re > 1.0)) {
            Some(k) => Err(DirichletError::DivergenceWarning { k: k + 1, re: self.s[k].re }),
            None => Ok(()),
        }
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn term(rec: &GeodesicRecord, point: &SeriesPoint) -> Result<Complex64, DirichletError> {
    let a = &rec.alpha.values;
    if a.len() != point.s.len() {
        return Err(DirichletError::DimensionMismatch { point: point.s.len(), record: a.len() });
    }
    let l: f64 = a.iter().product();
    let expo: Complex64 = point.s.iter().zip(a).map(|(s, &x)| s * x).sum();
    Ok((-expo).exp() * rec.index_weight * rec.multiplicity as f64 * l.powi(point.j as i32 + 1))
}

/// sum ind * mult * (prod alpha_k)^(j+1) * exp(-s . alpha) over the supplied records.
pub fn partial_l(records: &[GeodesicRecord], point: &SeriesPoint) -> Result<Complex64, DirichletError> {
    point.check_convergent()?;
    let mut acc = Complex64::new(0.0, 0.0);
    for rec in records {
        acc += term(rec, point)?;
    }
    Ok(acc)
}

/// q_M ((j+1)!)^r / prod (s_k - 1)^(j+2)
pub fn leading_term(point: &SeriesPoint, q_m: i64) -> Result<Complex64, DirichletError> {
    if let Some(k) = point.s.iter().position(|z| *z == Complex64::new(1.0, 0.0)) {
        return Err(DirichletError::PoleHit(k + 1));
    }
    let r = point.s.len() as i32;
    let num = q_m as f64 * factorial(point.j + 1).powi(r);
    let den: Complex64 = point.s.iter().map(|z| (z - 1.0).powi(point.j as i32 + 2)).product();
    Ok(Complex64::new(num, 0.0) / den)
}

/// prod (s_k - 1)^(j+2) L(s) / ((j+1)!)^r, which tends to q_M at the pole.
pub fn rescaled_partial_l(records: &[GeodesicRecord], point: &SeriesPoint) -> Result<Complex64, DirichletError> {
    let l = partial_l(records, point)?;
    let r = point.s.len() as i32;
    let scale: Complex64 = point.s.iter().map(|z| (z - 1.0).powi(point.j as i32 + 2)).product();
    Ok(l * scale / factorial(point.j + 1).powi(r))
}

/// (q_M, q_M^0) for the minimal parabolic of SL_d: M is finite, so p_M = 0 and only
/// the degree-zero term survives.
pub fn q_m_minimal_parabolic(d: usize) -> (i64, i64) {
    assert!(d >= 2, "SL_d needs d >= 2");
    (1, 1)
}

//! Coefficient ranges that provably contain every unit inside a box.
//!
//! The place logs are a linear function of alpha on the zero-sum hyperplane, so over
//! the closed box each sorted log is largest at a vertex. |e_k| is then at most
//! C(d,k) times the product of the k largest modulus bounds.

use super::SweepConfig;
use crate::chamber::logs_from_alpha;

/// Upper bounds for the sorted log-moduli (position i holds the bound for the i-th
/// largest modulus), maximised over the vertices of the box.
pub fn log_modulus_bounds(signature: (usize, usize), linear: &[f64]) -> Vec<f64> {
    let (r, s) = signature;
    let d = r + 2 * s;
    let k = linear.len();
    let mut best = vec![f64::NEG_INFINITY; d];
    for mask in 0u64..(1 << k) {
        let v: Vec<f64> = (0..k).map(|i| if mask >> i & 1 == 1 { linear[i] } else { 0.0 }).collect();
        let (re, cx) = logs_from_alpha(&v, signature);
        let mut all: Vec<f64> = re;
        for c in cx {
            all.push(c);
            all.push(c);
        }
        all.sort_by(|a, b| b.total_cmp(a));
        for (b, x) in best.iter_mut().zip(all) {
            *b = b.max(x);
        }
    }
    best
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// B_k with |e_k| <= B_k for k = 1..d-1; |e_d| = 1 for units.
pub fn coefficient_bounds(config: &SweepConfig) -> Vec<i64> {
    let linear = config.box_spec.linear_bounds();
    if linear.iter().any(|&a| a <= 0.0) {
        // no alpha can be strictly positive and below a non-positive bound
        return vec![0; config.degree - 1];
    }
    let lmax = log_modulus_bounds(config.signature, &linear);
    let d = config.degree;
    (1..d)
        .map(|k| {
            let top: f64 = lmax[..k].iter().sum();
            // shrink by far more than the float error so exact integers do not round up
            (binomial(d, k) * top.exp() * (1.0 - 1e-9)).ceil() as i64
        })
        .collect()
}

//! An order together with its structure constants and archimedean embeddings.

use crate::arith::fixed;
use crate::exactpoly::{isolate_roots, EmbeddingProfile, ExactPolyError};
use crate::orderfield::{MultTable, OrderBasis};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

const BASE_BITS: u32 = 320;

#[derive(Clone, Debug)]
pub struct OrderContext {
    pub order: OrderBasis,
    pub table: MultTable,
    pub profile: EmbeddingProfile,
    /// values[i][j] = sigma_i(b_j) for the r real and s complex-representative embeddings
    values: Vec<Vec<Complex64>>,
    /// fixed-point powers of theta at each embedding, scale `profile.precision_bits`
    theta_pows: Vec<Vec<(BigInt, BigInt)>>,
}

impl OrderContext {
    pub fn new(order: OrderBasis) -> Result<Self, ExactPolyError> {
        let profile = isolate_roots(&order.poly, BASE_BITS)?;
        Ok(Self::with_profile(order, profile))
    }

    pub fn with_profile(order: OrderBasis, profile: EmbeddingProfile) -> Self {
        let table = order.mult_table();
        let (r, s) = profile.signature;
        let d = order.degree();
        let bits = profile.precision_bits;
        let theta_pows: Vec<Vec<(BigInt, BigInt)>> = profile.roots[..r + s]
            .iter()
            .map(|root| {
                let (re, im) = root.center_fixed(bits);
                let mut out = vec![(fixed::one(bits), BigInt::zero())];
                for _ in 1..d {
                    let (a, b) = out.last().unwrap().clone();
                    out.push((
                        fixed::mul(&a, &re, bits) - fixed::mul(&b, &im, bits),
                        fixed::mul(&a, &im, bits) + fixed::mul(&b, &re, bits),
                    ));
                }
                out
            })
            .collect();
        let den = order.denominator.to_f64().unwrap();
        let values = theta_pows
            .iter()
            .map(|pows| {
                order
                    .matrix
                    .iter()
                    .map(|row| {
                        let (mut re, mut im) = (BigInt::zero(), BigInt::zero());
                        for (c, (pr, pi)) in row.iter().zip(pows) {
                            re += c * pr;
                            im += c * pi;
                        }
                        Complex64::new(fixed::to_f64(&re, bits), fixed::to_f64(&im, bits)) / den
                    })
                    .collect()
            })
            .collect();
        OrderContext { order, table, profile, values, theta_pows }
    }

    pub fn degree(&self) -> usize {
        self.order.degree()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.profile.signature
    }

    /// r + s - 1
    pub fn unit_rank(&self) -> usize {
        let (r, s) = self.signature();
        r + s - 1
    }

    /// Archimedean places: 1 for real, 2 for complex.
    pub fn place_weights(&self) -> Vec<f64> {
        let (r, s) = self.signature();
        (0..r + s).map(|i| if i < r { 1.0 } else { 2.0 }).collect()
    }

    /// sigma_i(x) in double precision, one value per place.
    pub fn embed(&self, x: &[BigInt]) -> Vec<Complex64> {
        let xf: Vec<f64> = x.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        self.embed_f64(&xf)
    }

    pub fn embed_f64(&self, x: &[f64]) -> Vec<Complex64> {
        self.values
            .iter()
            .map(|vals| vals.iter().zip(x).map(|(v, c)| v * c).sum())
            .collect()
    }

    /// Real vector whose squared length is the T2 form weighted by exp(-2 w_i).
    pub fn weighted_embedding(&self, x: &[BigInt], w: &[f64]) -> Vec<f64> {
        let r = self.signature().0;
        let mut out = Vec::with_capacity(self.degree());
        for (i, z) in self.embed(x).into_iter().enumerate() {
            let k = (-w[i]).exp();
            if i < r {
                out.push(k * z.re);
            } else {
                let k = k * std::f64::consts::SQRT_2;
                out.push(k * z.re);
                out.push(k * z.im);
            }
        }
        out
    }

    /// ln|sigma_i(x)| per place, in double precision from double embeddings.
    pub fn logs_fast(&self, x: &[BigInt]) -> Vec<f64> {
        self.embed(x).into_iter().map(|z| z.norm().ln()).collect()
    }

    /// ln|sigma_i(x)| per place, evaluated in fixed point.
    pub fn logs_precise(&self, x: &[BigInt]) -> Vec<f64> {
        let bits = self.profile.precision_bits;
        self.logs_fixed(x).iter().map(|l| fixed::to_f64(l, bits)).collect()
    }

    /// ln|sigma_i(x)| per place as fixed-point numerators at `profile.precision_bits`.
    pub fn logs_fixed(&self, x: &[BigInt]) -> Vec<BigInt> {
        let num = self.order.to_power_basis(x);
        let bits = self.profile.precision_bits;
        let need = num.iter().map(|c| c.bits() as u32).max().unwrap_or(0) * 2 + 128;
        if need > bits {
            // coefficients too large for the stored roots; redo at higher precision
            let hi = need.next_power_of_two();
            let profile = isolate_roots(&self.order.poly, hi).expect("roots already isolated once");
            let ctx = OrderContext::with_profile(self.order.clone(), profile);
            return ctx.logs_fixed(x).iter().map(|l| fixed::rescale(l, hi, bits)).collect();
        }
        let ln_den = fixed::ln(&fixed::from_int(&self.order.denominator, bits), bits);
        self.theta_pows
            .iter()
            .map(|pows| {
                let (mut re, mut im) = (BigInt::zero(), BigInt::zero());
                for (c, (pr, pi)) in num.iter().zip(pows) {
                    re += c * pr;
                    im += c * pi;
                }
                fixed::ln_abs_complex(&re, &im, bits) - &ln_den
            })
            .collect()
    }

    /// Same as `log_vector` in fixed point.
    pub fn log_vector_fixed(&self, x: &[BigInt]) -> Vec<BigInt> {
        let r = self.signature().0;
        self.logs_fixed(x)
            .into_iter()
            .enumerate()
            .map(|(i, l)| if i < r { l } else { l << 1 })
            .collect()
    }

    /// Regulator-convention log vector: ln|rho_i| for real places, 2 ln|sigma_j| for complex.
    pub fn log_vector(&self, x: &[BigInt]) -> Vec<f64> {
        let r = self.signature().0;
        self.logs_precise(x)
            .into_iter()
            .enumerate()
            .map(|(i, l)| if i < r { l } else { 2.0 * l })
            .collect()
    }

    /// Coordinates of the element whose embeddings are approximately `target`, rounded.
    pub fn from_embeddings(&self, target: &[Complex64]) -> Option<Vec<BigInt>> {
        let d = self.degree();
        let r = self.signature().0;
        // real linear system: real places give one equation, complex places two
        let mut a = Vec::with_capacity(d);
        let mut rhs = Vec::with_capacity(d);
        for (i, vals) in self.values.iter().enumerate() {
            a.push(vals.iter().map(|v| v.re).collect::<Vec<f64>>());
            rhs.push(target[i].re);
            if i >= r {
                a.push(vals.iter().map(|v| v.im).collect());
                rhs.push(target[i].im);
            }
        }
        let sol = solve_dense(a, rhs)?;
        let mut out = Vec::with_capacity(d);
        for x in sol {
            if !x.is_finite() || (x - x.round()).abs() > 0.25 || x.abs() > 1e15 {
                return None;
            }
            out.push(BigInt::from(x.round() as i64));
        }
        Some(out)
    }

    /// Sign of the element at the first real place.
    pub fn first_real_sign(&self, x: &[BigInt]) -> bool {
        self.embed(x)[0].re.is_sign_positive()
    }

    /// -x if needed so the first real embedding is positive.
    pub fn normalize_sign(&self, x: Vec<BigInt>) -> Vec<BigInt> {
        if self.first_real_sign(&x) {
            x
        } else {
            x.into_iter().map(|c| -c).collect()
        }
    }

    pub fn is_unit(&self, x: &[BigInt]) -> bool {
        self.table.norm(x).abs() == BigInt::from(1)
    }
}

/// Gaussian elimination with partial pivoting.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if !(a[p][c].abs() >= 1e-300) {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            if f != 0.0 {
                for j in c..n {
                    a[i][j] -= f * a[c][j];
                }
                b[i] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// |det| of a square matrix in double precision.
pub(crate) fn abs_det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = match (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) {
            Some(p) => p,
            None => return 0.0,
        };
        if a[p][c] == 0.0 {
            return 0.0;
        }
        a.swap(c, p);
        det *= a[c][c];
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                a[i][j] -= f * a[c][j];
            }
        }
    }
    det.abs()
}

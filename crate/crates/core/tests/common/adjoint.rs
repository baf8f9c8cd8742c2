//! det(1 - Ad(a) | n) read off the eigenvalues of X -> C X C^-1 for the companion matrix C.

use nalgebra::DMatrix;
use pgeo_core::exactpoly::MonicIntPolynomial;

pub fn companion(p: &MonicIntPolynomial) -> DMatrix<f64> {
    let d = p.degree();
    let mut c = DMatrix::zeros(d, d);
    for i in 1..d {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        c[(i, d - 1)] = -p.coeff(i).to_string().parse::<f64>().unwrap();
    }
    c
}

/// Product of (1 - e) over the eigenvalues e of Ad(C) with |e| < 1.
pub fn det_oracle(p: &MonicIntPolynomial) -> f64 {
    let c = companion(p);
    let inv = c.clone().try_inverse().unwrap();
    let ad = inv.transpose().kronecker(&c);
    let mut acc = nalgebra::Complex::new(1.0, 0.0);
    let schur = nalgebra::Schur::try_new(ad, 1e-13, 2000).expect("Schur iteration converges");
    for e in schur.complex_eigenvalues().iter() {
        if e.norm() < 1.0 - 1e-9 {
            acc *= nalgebra::Complex::new(1.0, 0.0) - e;
        }
    }
    acc.re
}

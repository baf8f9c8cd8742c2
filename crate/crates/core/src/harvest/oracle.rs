//! Units of one field inside a box, generated from certified fundamental units. This is
//! the reference the char-poly sweep is checked against.

use super::log_modulus_bounds;
use crate::chamber::{alpha_from_logs, in_box_values, BoxSpec};
use crate::exactpoly::MonicIntPolynomial;
use crate::unitlattice::FieldInvariants;
use std::collections::BTreeMap;

/// Canonical characteristic polynomial of every unit modulo +-1 of the field whose
/// alpha lies in the box, with the number of such units sharing it.
pub fn units_in_box(field: &FieldInvariants, spec: &BoxSpec) -> BTreeMap<MonicIntPolynomial, u32> {
    let (r, s) = field.signature();
    let d = r + 2 * s;
    let k = field.units.rank;
    let logs = field.units.place_logs(r);
    let lmax = log_modulus_bounds((r, s), &spec.linear_bounds())[0].max(0.0);
    // every log modulus of an in-box unit is within (d-1) lmax of zero
    let reach = (d - 1) as f64 * lmax;
    let sub: Vec<Vec<f64>> = logs.iter().map(|row| row[..k].to_vec()).collect();
    let inv = invert(&sub);
    let n: Vec<i64> = (0..k).map(|j| ((0..k).map(|i| inv[i][j].abs()).sum::<f64>() * reach).ceil() as i64 + 1).collect();
    let table = &field.ctx.table;
    let mut out = BTreeMap::new();
    let mut e: Vec<i64> = n.iter().map(|x| -x).collect();
    loop {
        if e.iter().any(|&x| x != 0) {
            let l: Vec<f64> = (0..r + s).map(|i| (0..k).map(|j| e[j] as f64 * logs[j][i]).sum()).collect();
            let mut re = l[..r].to_vec();
            let mut cx = l[r..].to_vec();
            re.sort_by(|a, b| b.total_cmp(a));
            cx.sort_by(|a, b| b.total_cmp(a));
            let alpha = alpha_from_logs(&re, &cx);
            if in_box_values(&alpha.values, spec).unwrap_or(false) {
                let mut u = table.one();
                for (g, &x) in field.units.generators.iter().zip(&e) {
                    u = table.mul(&u, &table.pow_signed(g, x).expect("unit"));
                }
                let p = MonicIntPolynomial::from_full(&table.charpoly(&u)).expect("monic").canonical_sign();
                *out.entry(p).or_insert(0) += 1;
            }
        }
        let mut j = 0;
        while j < k {
            e[j] += 1;
            if e[j] <= n[j] {
                break;
            }
            e[j] = -n[j];
            j += 1;
        }
        if j == k {
            break;
        }
    }
    out
}

fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        let piv = m[c][c];
        for x in m[c].iter_mut() {
            *x /= piv;
        }
        for i in 0..n {
            if i != c {
                let f = m[i][c];
                let row = m[c].clone();
                for (x, y) in m[i].iter_mut().zip(row) {
                    *x -= f * y;
                }
            }
        }
    }
    m.into_iter().map(|row| row[n..].to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chamber::BoxConvention;
    use crate::unitlattice::InvariantConfig;

    #[test]
    fn minus_23_powers() {
        let f = FieldInvariants::compute(&MonicIntPolynomial::from_i64(&[-1, -1, 0]), &InvariantConfig::default()).unwrap();
        let spec = BoxSpec::new(vec![1e3], BoxConvention::Multiplicative).unwrap();
        let units = units_in_box(&f, &spec);
        let r = f.units.regulator();
        assert_eq!(units.len(), (1e3f64.ln() / (3.0 * r)).floor() as usize);
        assert!(units.values().all(|&m| m == 1));
    }
}

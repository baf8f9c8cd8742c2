use num_bigint::BigInt;
use num_traits::{One, Zero};
use pgeo_core::arith::intmat::IMat;
use pgeo_core::exactpoly::{discriminant, is_irreducible, MonicIntPolynomial};
use pgeo_core::orderfield::{
    intermediate_lattices, maximal_order, residue_unit_counts, residue_unit_counts_bruteforce, splitting_type, stickelberger_ok,
};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn cubic() -> impl Strategy<Value = MonicIntPolynomial> {
    (-30i64..=30, -30i64..=30, -60i64..=60).prop_map(|(a, b, c)| MonicIntPolynomial::from_i64(&[c, b, a]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn maximal_order_invariants(p in cubic()) {
        prop_assume!(is_irreducible(&p));
        let max = maximal_order(&p);
        prop_assert!(stickelberger_ok(&max.field_discriminant));
        prop_assert_eq!(discriminant(&p), &max.field_discriminant * &max.index * &max.index);
        prop_assert!(max.basis.is_ring());
        for q in [2u64, 3, 5, 7] {
            let st = splitting_type(&max.basis, &p, q);
            let total: usize = st.factors.iter().map(|(e, f)| e * f).sum();
            prop_assert_eq!(total, 3);
            if st.is_non_decomposed() {
                let (e, f) = st.factors[0];
                let ramified = (&max.field_discriminant % BigInt::from(q)).is_zero();
                prop_assert_eq!(f, if ramified { 1 } else { 3 });
                prop_assert_eq!(e, if ramified { 3 } else { 1 });
            }
        }
    }

    #[test]
    fn intermediate_orders_are_rings(p in cubic()) {
        prop_assume!(is_irreducible(&p));
        let max = maximal_order(&p);
        prop_assume!(max.index <= BigInt::from(64));
        let all = intermediate_lattices(&max.basis, &BTreeSet::new());
        prop_assert!(!all.is_empty());
        let first = max.basis.sublattice(&all[0]);
        prop_assert_eq!(&first, &max.basis);
        for rows in &all {
            let o = max.basis.sublattice(rows);
            prop_assert!(o.is_ring());
            prop_assert!(max.basis.contains(&o));
        }
        let s: BTreeSet<u64> = [2, 3].into();
        let n = all.len();
        let at_s = intermediate_lattices(&max.basis, &s);
        prop_assert!(at_s.len() <= n);
        for rows in &at_s {
            let o = max.basis.sublattice(rows);
            let index = &max.index / o.index();
            prop_assert!(!(&index % 2u32).is_zero() && !(&index % 3u32).is_zero(), "index {}", index);
        }
    }
}

fn scaled(k: i64) -> IMat {
    let d = |x: i64| BigInt::from(x);
    vec![vec![d(1), d(0), d(0)], vec![d(0), d(k), d(0)], vec![d(0), d(0), d(k * k)]]
}

#[test]
fn order_count_is_multiplicative_over_coprime_parts() {
    // theta = 6 * root of x^3 - x - 1, so [O_F : Z[theta]] = 216 = 2^3 3^3
    let p = MonicIntPolynomial::from_i64(&[-216, -36, 0]);
    let max = maximal_order(&p);
    assert_eq!(max.index, BigInt::from(216));
    let all = intermediate_lattices(&max.basis, &BTreeSet::new()).len();
    let two = intermediate_lattices(&max.basis, &[3].into()).len();
    let three = intermediate_lattices(&max.basis, &[2].into()).len();
    assert!(two > 1 && three > 1);
    assert_eq!(all, two * three);
}

#[test]
fn unit_ratio_is_multiplicative_over_coprime_conductors() {
    let p = MonicIntPolynomial::from_i64(&[-1, -1, 0]);
    let max = maximal_order(&p).basis;
    let ratio = |k| residue_unit_counts(&max.sublattice(&scaled(k)), &max).unit_ratio();
    let (r2, r3, r6) = (ratio(2), ratio(3), ratio(6));
    assert!((r6 - r2 * r3).abs() < 1e-12 * r6);
    for k in [2, 3, 4] {
        let o = max.sublattice(&scaled(k));
        assert_eq!(residue_unit_counts(&o, &max), residue_unit_counts_bruteforce(&o, &max, 100_000).unwrap());
    }
    assert!(residue_unit_counts(&max, &max).conductor_index.is_one());
}

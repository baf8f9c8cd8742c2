mod common;

use common::adjoint::det_oracle;
use pgeo_core::chamber::{
    alpha_coords, alpha_from_logs, det_for_profile, det_one_minus_ad_n, in_box, logs_from_alpha, psi, BoxConvention, BoxSpec,
    GeodesicRecord,
};
use pgeo_core::exactpoly::{is_irreducible, isolate_roots, MonicIntPolynomial};
use num_complex::Complex64;
use proptest::prelude::*;

fn unit_cubic() -> impl Strategy<Value = MonicIntPolynomial> {
    (-15i64..=15, -15i64..=15, prop::bool::ANY).prop_map(|(a, b, neg)| MonicIntPolynomial::from_i64(&[if neg { -1 } else { 1 }, b, a]))
}

fn record(alpha: Vec<f64>, sig: (usize, usize), w: f64, m: u32) -> GeodesicRecord {
    let (re, cx) = logs_from_alpha(&alpha, sig);
    let a = alpha_from_logs(&re, &cx);
    GeodesicRecord { log_moduli: vec![], flat_volume: w, alpha: a, index_weight: w, multiplicity: m }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn inversion_laws(p in unit_cubic()) {
        prop_assume!(is_irreducible(&p));
        let a = alpha_coords(&isolate_roots(&p, 128).unwrap());
        let q = p.reciprocal().unwrap();
        let b = alpha_coords(&isolate_roots(&q, 128).unwrap());
        if a.signature == (3, 0) {
            prop_assert!((a.values[0] - b.values[1]).abs() < 1e-12 * a.values[0].abs().max(1.0));
            prop_assert!((a.values[1] - b.values[0]).abs() < 1e-12 * a.values[1].abs().max(1.0));
        } else {
            prop_assert!((a.values[0] + b.values[0]).abs() < 1e-12 * a.values[0].abs().max(1.0));
            prop_assert!((a.values[0] > 0.0) != (b.values[0] > 0.0));
        }
    }

    #[test]
    fn det_matches_adjoint_action(p in unit_cubic()) {
        prop_assume!(is_irreducible(&p));
        let prof = isolate_roots(&p, 128).unwrap();
        let det = det_for_profile(&prof).unwrap();
        let pairs = if prof.signature == (3, 0) { 3 } else { 2 };
        prop_assert!(det > 0.0 && det < f64::from(1u32 << pairs));
        let oracle = det_oracle(&p);
        prop_assert!((det - oracle).abs() <= 1e-10 * oracle.abs(), "{} vs {}", det, oracle);
    }

    #[test]
    fn psi_monotone_and_conventions_agree(
        pts in prop::collection::vec((0.01f64..8.0, 0.01f64..8.0, 0.1f64..3.0, 1u32..4), 1..60),
        t in (0.5f64..8.0, 0.5f64..8.0),
        dt in (0.0f64..2.0, 0.0f64..2.0),
    ) {
        let recs: Vec<GeodesicRecord> = pts.iter().map(|&(a, b, w, m)| record(vec![a, b], (3, 0), w, m)).collect();
        let lin = |x: f64, y: f64| BoxSpec::new(vec![x, y], BoxConvention::Linear).unwrap();
        let mul = BoxSpec::new(vec![t.0.exp(), t.1.exp()], BoxConvention::Multiplicative).unwrap();
        let small = psi(&recs, &lin(t.0, t.1)).unwrap();
        prop_assert!(small <= psi(&recs, &lin(t.0 + dt.0, t.1)).unwrap());
        prop_assert!(small <= psi(&recs, &lin(t.0, t.1 + dt.1)).unwrap());
        // exp then ln may move a threshold by an ulp, so compare membership directly
        let a: Vec<bool> = recs.iter().map(|r| in_box(&r.alpha, &lin(t.0, t.1)).unwrap()).collect();
        let b: Vec<bool> = recs.iter().map(|r| in_box(&r.alpha, &mul).unwrap()).collect();
        if a == b {
            prop_assert_eq!(small, psi(&recs, &mul).unwrap());
        }
    }
}

#[test]
fn det_tends_to_one_deep_in_the_chamber() {
    for sig in [(3usize, 0usize), (1, 1)] {
        let mut last = f64::INFINITY;
        for n in [2.0, 4.0, 8.0, 16.0, 32.0] {
            let alpha = vec![n; sig.0 + sig.1 - 1];
            let (re, cx) = logs_from_alpha(&alpha, sig);
            let mut roots: Vec<Complex64> = re.iter().map(|l| Complex64::new(l.exp(), 0.0)).collect();
            for l in &cx {
                let z = Complex64::from_polar(l.exp(), 0.7);
                roots.push(z);
                roots.push(z.conj());
            }
            let dev = (det_one_minus_ad_n(&roots).unwrap() - 1.0).abs();
            assert!(dev <= last);
            last = dev;
        }
        assert!(last < 1e-6);
    }
}

use birthcut::numerics::{Mp, PrecisionContext};
use birthcut::orthopoly::{measured_orthogonality, stieltjes_recurrence, KernelEvaluator, WeightSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn kernel_is_symmetric_with_nonnegative_diagonal(nu in 1u32..=2, n in 2usize..12, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let ev = KernelEvaluator::new(WeightSpec::model(nu, 0.0).unwrap(), n, &PrecisionContext::with_bits(128)).unwrap();
        let (a, b) = (ev.eval(x, y), ev.eval(y, x));
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300));
        prop_assert!(ev.eval(x, x) >= 0.0);
    }

    #[test]
    fn reproducing_on_random_pairs(x in -1.5f64..1.5, z in -1.5f64..1.5) {
        let ev = KernelEvaluator::new(WeightSpec::model(1, 0.0).unwrap(), 8, &PrecisionContext::with_bits(128)).unwrap();
        prop_assert!(ev.reproducing_residual(x, z, &PrecisionContext::default()).unwrap() < 1e-8);
    }

    #[test]
    fn even_weights_give_parity(k in 0usize..20, x in 0.1f64..3.0) {
        let table = stieltjes_recurrence(&WeightSpec::model(2, 0.0).unwrap(), 20, &PrecisionContext::with_bits(128)).unwrap();
        let (p, m) = (table.eval(k, x), table.eval(k, -x));
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((p - sign * m).abs() <= 1e-12 * p.abs().max(1.0));
    }
}

#[test]
fn norms_are_products_of_recurrence_coefficients() {
    let table = stieltjes_recurrence(&WeightSpec::model(1, 0.3).unwrap(), 30, &PrecisionContext::with_bits(192)).unwrap();
    let mut h = table.h_mp(0).clone();
    for k in 1..=30 {
        h = &h * table.b_mp(k);
        let rel = ((&h - table.h_mp(k)) / table.h_mp(k)).to_f64().abs();
        assert!(rel < 1e-10, "k = {k}: {rel}");
    }
    assert!(table.b(5) > 0.0 && table.h(5) > 0.0);
    let _ = Mp::one(64);
}

#[test]
fn orthogonality_improves_with_precision() {
    let w = WeightSpec::model(1, 0.0).unwrap();
    let lo = measured_orthogonality(&stieltjes_recurrence(&w, 20, &PrecisionContext::with_bits(96)).unwrap(), &w);
    let hi = measured_orthogonality(&stieltjes_recurrence(&w, 20, &PrecisionContext::with_bits(160)).unwrap(), &w);
    // 64 more bits: expect roughly 2^-64
    assert!(hi < lo * 2f64.powi(-40), "{lo:e} -> {hi:e}");
}

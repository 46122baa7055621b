use birthcut::ansatz::build_params;
use birthcut::equilibrium::{solve_one_cut, synthesize_birth_potential};
use birthcut::numerics::PrecisionContext;
use birthcut::rht::{g_eval, jump_suite, pi_matrix, GFunction, ParametrixFrame};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pi_has_unit_determinant(re in -6.0f64..6.0, im in prop_oneof![-3.0f64..-1e-3, 1e-3f64..3.0]) {
        let p = pi_matrix(Complex64::new(re, im), -2.003, 2.02).unwrap();
        prop_assert!((p.determinant() - 1.0).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn jumps_hold_across_delta_t(log_dt in -4.0f64..-2.5) {
        let ctx = PrecisionContext::default();
        let (v, rep) = synthesize_birth_potential(3.0, 1, &ctx).unwrap();
        let m1 = solve_one_cut(&v, 1.0, &ctx).unwrap();
        let params = build_params(&rep, 10f64.powf(log_dt), 1500, &ctx).unwrap();
        let gf = GFunction::supercritical(&params, &m1).unwrap();
        let frame = ParametrixFrame::supercritical(&gf, &v, &params).unwrap();
        let jumps = jump_suite(&gf, &frame, 5).unwrap();
        for j in &jumps {
            prop_assert!(j.residual <= 1e-8, "{} on {} at {}: {:e}", j.object, j.piece, j.point, j.residual);
        }
        let pieces: std::collections::BTreeSet<_> = jumps.iter().map(|j| (j.object.clone(), j.piece.clone())).collect();
        for p in &pieces {
            prop_assert!(jumps.iter().filter(|j| (&j.object, &j.piece) == (&p.0, &p.1)).count() >= 5);
        }
        // unit total mass: g − log x settles
        let d = |x: f64| g_eval(&gf, Complex64::new(x, 0.0)).re - x.ln();
        prop_assert!((d(1e5) - d(1e6)).abs() < 1e-4);
    }
}

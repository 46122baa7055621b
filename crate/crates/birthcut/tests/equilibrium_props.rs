use birthcut::equilibrium::{
    detect_critical_point, effective_potential, solve_one_cut, synthesize_birth_potential, Potential,
};
use birthcut::numerics::{Interval, Polynomial, PrecisionContext};
use proptest::prelude::*;

fn quartic(c2: f64, c4: f64) -> Potential {
    Potential::new(Polynomial::new(vec![0.0, 0.0, c2, 0.0, c4]), "test quartic").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convex_quartics_solve_cleanly(c2 in 0.2f64..2.0, c4 in 0.0f64..0.5, t in 0.3f64..2.0) {
        let ctx = PrecisionContext::default();
        let v = quartic(c2, c4);
        let m = solve_one_cut(&v, t, &ctx).unwrap();
        prop_assert!((m.mass() - 1.0).abs() < 1e-10);
        prop_assert!((m.a() + m.b()).abs() < 1e-10, "even potential gives a symmetric support");
        let w = m.support().width();
        for x in m.support().samples(25, 0.02 * w) {
            prop_assert!(m.density(x) >= 0.0);
            prop_assert!(effective_potential(&m, &v, x).abs() < 1e-9);
        }
        for x in [m.b() + 0.1 * w, m.b() + w, m.a() - 0.5 * w] {
            prop_assert!(effective_potential(&m, &v, x) < 0.0);
        }
    }

    #[test]
    fn support_and_mass_grow_with_t(t1 in 0.4f64..0.99, gap in 0.005f64..0.5) {
        let ctx = PrecisionContext::default();
        let (v, _) = synthesize_birth_potential(3.0, 1, &ctx).unwrap();
        let t2 = (t1 + gap).min(1.0);
        let m1 = solve_one_cut(&v, t1, &ctx).unwrap();
        let m2 = solve_one_cut(&v, t2, &ctx).unwrap();
        prop_assert!(m2.a() <= m1.a() + 1e-12 && m1.b() <= m2.b() + 1e-12);
        for x in m1.support().samples(30, 1e-3) {
            prop_assert!(t2 * m2.density(x) >= t1 * m1.density(x) - 1e-8, "x = {x}");
        }
    }

    #[test]
    fn synthesis_round_trips(x_star in 2.6f64..5.0) {
        let ctx = PrecisionContext::default();
        let (v, report) = synthesize_birth_potential(x_star, 1, &ctx).unwrap();
        prop_assert!(report.c_star >= -1e-12);
        let m = solve_one_cut(&v, 1.0, &ctx).unwrap();
        let found = detect_critical_point(&m, &v, Interval::new(2.1, x_star + 2.0).unwrap(), &ctx).unwrap();
        prop_assert!((found.x_star - x_star).abs() < 1e-6);
        prop_assert_eq!(found.nu, 1);
        prop_assert!(found.c_star >= -1e-12);
    }
}

#[test]
fn potential_file_round_trip_solves_identically() {
    let ctx = PrecisionContext::default();
    let (v, _) = synthesize_birth_potential(3.0, 2, &ctx).unwrap();
    let back = Potential::from_text(&v.to_text()).unwrap();
    let (a, b) = (solve_one_cut(&v, 0.9, &ctx).unwrap(), solve_one_cut(&back, 0.9, &ctx).unwrap());
    assert_eq!((a.a(), a.b()), (b.a(), b.b()));
}

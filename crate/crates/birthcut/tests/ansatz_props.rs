use birthcut::ansatz::{build_params, rho_tilde};
use birthcut::equilibrium::synthesize_birth_potential;
use birthcut::numerics::PrecisionContext;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn density_is_nonnegative_on_both_bands(log_dt in -6.0f64..-3.0, nu in 1u32..=2) {
        let ctx = PrecisionContext::default();
        let (_, rep) = synthesize_birth_potential(3.0, nu, &ctx).unwrap();
        let p = build_params(&rep, 10f64.powf(log_dt), 500, &ctx).unwrap();
        prop_assert!(p.main_band().hi() < p.newborn_band().lo());
        for x in p.main_band().samples(80, 0.0).into_iter().chain(p.newborn_band().samples(40, 0.0)) {
            prop_assert!(rho_tilde(x, &p, &rep) >= 0.0, "x = {x}");
        }
        prop_assert_eq!(p.ubar_t, (p.u_t + 0.5).floor() as u64);
    }
}

#[test]
fn overlapping_bands_are_refused() {
    let ctx = PrecisionContext::default();
    let (_, rep) = synthesize_birth_potential(3.0, 2, &ctx).unwrap();
    assert!(matches!(build_params(&rep, 1e-2, 500, &ctx), Err(birthcut::Error::Precondition(_))));
}

#[test]
fn coupled_filling_approaches_its_limit() {
    let ctx = PrecisionContext::default();
    let (_, rep) = synthesize_birth_potential(3.0, 1, &ctx).unwrap();
    let u_plus = 0.7;
    let target = 2.0 * rep.phi_at_xstar * u_plus;
    let mut prev: Option<(f64, f64)> = None;
    for e in [10, 20, 40] {
        let n = 2f64.powi(e);
        let p = build_params(&rep, u_plus * n.ln() / n, n as u64, &ctx).unwrap();
        let gap = (p.u_t - target).abs() / target;
        if let Some((g, s)) = prev {
            assert!(gap < g, "n = 2^{e}: {gap} vs {g}");
            assert!(p.sigma_t < s);
        }
        prev = Some((gap, p.sigma_t));
    }
    assert!(prev.unwrap().0 < 0.15);
}

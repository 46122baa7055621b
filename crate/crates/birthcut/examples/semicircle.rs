//! Equilibrium measure of V(x) = x²/2 and of V/t for a few t.

use birthcut::equilibrium::{effective_potential, solve_one_cut, Potential};
use birthcut::numerics::PrecisionContext;

fn main() -> birthcut::Result<()> {
    let ctx = PrecisionContext::default();
    let v = Potential::gaussian();
    for t in [1.0, 0.5, 2.0] {
        let m = solve_one_cut(&v, t, &ctx)?;
        // semicircle of radius 2√t
        let r = 2.0 * t.sqrt();
        let err = (1..50)
            .map(|i| {
                let x = -r + 2.0 * r * i as f64 / 50.0;
                (m.density(x) - (r * r - x * x).sqrt() / (2.0 * std::f64::consts::PI * t)).abs()
            })
            .fold(0.0, f64::max);
        println!(
            "t = {t}: support [{:+.12}, {:+.12}], mass {:.12}, sup density error {err:.2e}, E(r + 1) = {:.6}",
            m.a(),
            m.b(),
            m.mass(),
            effective_potential(&m, &v, r + 1.0)
        );
    }
    Ok(())
}

//! Potentials whose effective potential touches zero to order 2ν at x* = 3,
//! and the round trip through critical-point detection.

use birthcut::equilibrium::{detect_critical_point, effective_potential, solve_one_cut, synthesize_birth_potential};
use birthcut::numerics::{Interval, PrecisionContext};

fn main() -> birthcut::Result<()> {
    let ctx = PrecisionContext::default();
    for nu in [1, 2] {
        let (v, report) = synthesize_birth_potential(3.0, nu, &ctx)?;
        println!("nu = {nu}: V = {}", v.poly());
        println!("  Q(x*) = {:.6e}  phi(x*) = {:.6}  varphi(x*) = {:.6}  margin = {:.3e}", report.q_at_xstar, report.phi_at_xstar, report.varphi_at_xstar, report.margin);
        let m = solve_one_cut(&v, 1.0, &ctx)?;
        for x in [2.5, 2.9, 3.0, 3.1, 4.0] {
            println!("  E({x}) = {:+.3e}", effective_potential(&m, &v, x));
        }
        let found = detect_critical_point(&m, &v, Interval::new(2.2, 6.0)?, &ctx)?;
        println!("  detected x* = {:.10}, order 2nu = {}", found.x_star, 2 * found.nu);
    }
    Ok(())
}
